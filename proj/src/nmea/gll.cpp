#include "obdfleet/nmea/gll.hpp"

#include "obdfleet/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

namespace obdfleet::nmea {

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

unsigned parse_uint(std::string_view s, std::string_view what)
{
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (!all_digits(s) || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(Errc::MalformedField, std::string(what) + " '" + std::string(s) + "'");
    }
    return value;
}

int hex_digit(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

std::vector<std::string_view> split_fields(std::string_view body)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = body.find(',', start);
        fields.push_back(body.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

// "ddmm.mmmm" / "dddmm.mmmm" -> unsigned decimal degrees
double parse_angle(std::string_view field, std::size_t degree_digits, std::string_view what)
{
    const auto dot = field.find('.');
    const auto int_part = field.substr(0, dot);
    if (int_part.size() != degree_digits + 2 || !all_digits(int_part)) {
        throw Error(Errc::MalformedField, std::string(what) + " '" + std::string(field) + "'");
    }
    if (dot != std::string_view::npos && !all_digits(field.substr(dot + 1))) {
        throw Error(Errc::MalformedField, std::string(what) + " '" + std::string(field) + "'");
    }
    const double degrees = parse_uint(int_part.substr(0, degree_digits), what);
    const auto minutes_text = field.substr(degree_digits);
    double minutes = 0.0;
    auto [ptr, ec] = std::from_chars(minutes_text.data(), minutes_text.data() + minutes_text.size(), minutes);
    if (ec != std::errc{} || ptr != minutes_text.data() + minutes_text.size()) {
        throw Error(Errc::MalformedField, std::string(what) + " '" + std::string(field) + "'");
    }
    if (minutes >= 60.0) throw Error(Errc::OutOfRange, std::string(what) + " minutes >= 60");
    return degrees + minutes / 60.0;
}

std::string format_angle(double value, int degree_digits)
{
    // 1e-4 arc-minute units, rounded once so minutes never render as 60.
    const auto units = std::llround(std::fabs(value) * 600000.0);
    const auto degrees = units / 600000;
    const auto rem = units % 600000;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*lld%02lld.%04lld", degree_digits, degrees, rem / 10000, rem % 10000);
    return buf;
}

} // namespace

UtcTime UtcTime::parse(std::string_view text)
{
    const auto dot = text.find('.');
    const auto hms = text.substr(0, dot);
    if (hms.size() != 6 || !all_digits(hms)) {
        throw Error(Errc::MalformedField, "UTC time '" + std::string(text) + "'");
    }
    const unsigned hh = parse_uint(hms.substr(0, 2), "UTC hours");
    const unsigned mm = parse_uint(hms.substr(2, 2), "UTC minutes");
    const unsigned ss = parse_uint(hms.substr(4, 2), "UTC seconds");
    if (hh > 23 || mm > 59 || ss > 60) throw Error(Errc::OutOfRange, "UTC time '" + std::string(text) + "'");
    unsigned millis = 0;
    if (dot != std::string_view::npos) {
        auto frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 3 || !all_digits(frac)) {
            throw Error(Errc::MalformedField, "UTC fraction '" + std::string(text) + "'");
        }
        millis = parse_uint(frac, "UTC fraction");
        for (auto n = frac.size(); n < 3; ++n) millis *= 10;
    }
    return UtcTime{((hh * 60 + mm) * 60 + ss) * 1000 + millis};
}

std::string UtcTime::to_string() const
{
    const unsigned total_s = millis / 1000;
    char buf[16];
    if (millis % 1000 == 0) {
        std::snprintf(buf, sizeof buf, "%02u%02u%02u", total_s / 3600, total_s / 60 % 60, total_s % 60);
    } else {
        std::snprintf(buf, sizeof buf, "%02u%02u%02u.%03u", total_s / 3600, total_s / 60 % 60, total_s % 60,
                      millis % 1000);
    }
    return buf;
}

std::uint8_t sentence_checksum(std::string_view body)
{
    std::uint8_t x = 0;
    for (char c : body) x ^= static_cast<std::uint8_t>(c);
    return x;
}

GeoFix parse_gll(std::string_view sentence)
{
    while (!sentence.empty() && (sentence.back() == '\r' || sentence.back() == '\n')) sentence.remove_suffix(1);
    if (sentence.empty() || sentence.front() != '$') {
        throw Error(Errc::MalformedField, "sentence must start with '$'");
    }
    const auto star = sentence.rfind('*');
    if (star == std::string_view::npos || sentence.size() - star != 3) {
        throw Error(Errc::MalformedField, "sentence must end with *HH");
    }
    const int hi = hex_digit(sentence[star + 1]);
    const int lo = hex_digit(sentence[star + 2]);
    if (hi < 0 || lo < 0) throw Error(Errc::MalformedField, "checksum is not hex");
    const auto body = sentence.substr(1, star - 1);
    if (sentence_checksum(body) != (hi << 4 | lo)) {
        throw Error(Errc::BadChecksum, "sentence checksum mismatch");
    }

    const auto f = split_fields(body);
    const auto type = f[0];
    if (type.size() != 5 || type.substr(2) != "GLL" || !std::isupper(static_cast<unsigned char>(type[0])) ||
        !std::isupper(static_cast<unsigned char>(type[1]))) {
        throw Error(Errc::WrongSentenceType, "not a GLL sentence: '" + std::string(type) + "'");
    }
    if (f.size() != 7 && f.size() != 8) {
        throw Error(Errc::MalformedField, "GLL needs 6 or 7 data fields");
    }

    GeoFix fix;
    if (f[6] == "A") {
        fix.status = FixStatus::Valid;
    } else if (f[6] == "V") {
        fix.status = FixStatus::Void;
    } else {
        throw Error(Errc::MalformedField, "status '" + std::string(f[6]) + "'");
    }
    if (f.size() == 8 && f[7].size() > 1) throw Error(Errc::MalformedField, "mode indicator");

    const bool position_empty = f[1].empty() && f[2].empty() && f[3].empty() && f[4].empty();
    if (!(position_empty && !fix.valid())) {
        double lat = parse_angle(f[1], 2, "latitude");
        double lon = parse_angle(f[3], 3, "longitude");
        if (lat > 90.0) throw Error(Errc::OutOfRange, "latitude above 90 degrees");
        if (lon > 180.0) throw Error(Errc::OutOfRange, "longitude above 180 degrees");
        if (f[2] == "S") {
            lat = -lat;
        } else if (f[2] != "N") {
            throw Error(Errc::MalformedField, "latitude hemisphere '" + std::string(f[2]) + "'");
        }
        if (f[4] == "W") {
            lon = -lon;
        } else if (f[4] != "E") {
            throw Error(Errc::MalformedField, "longitude hemisphere '" + std::string(f[4]) + "'");
        }
        fix.latitude = lat;
        fix.longitude = lon;
    }
    if (!f[5].empty() || fix.valid()) fix.utc_time = UtcTime::parse(f[5]);
    return fix;
}

std::string render_gll(const GeoFix& fix)
{
    std::string body = "GPGLL,";
    body += format_angle(fix.latitude, 2);
    body += fix.latitude < 0 && std::llround(-fix.latitude * 600000.0) != 0 ? ",S," : ",N,";
    body += format_angle(fix.longitude, 3);
    body += fix.longitude < 0 && std::llround(-fix.longitude * 600000.0) != 0 ? ",W," : ",E,";
    body += fix.utc_time.to_string();
    body += fix.valid() ? ",A" : ",V";
    char tail[8];
    std::snprintf(tail, sizeof tail, "*%02X", sentence_checksum(body));
    return "$" + body + tail;
}

} // namespace obdfleet::nmea
