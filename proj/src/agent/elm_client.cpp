#include "obdfleet/agent/elm_client.hpp"

#include "obdfleet/codec/obd.hpp"
#include "obdfleet/error.hpp"

#include <algorithm>
#include <cctype>

namespace obdfleet::agent {

namespace {

std::string squash(std::string_view s)
{
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

} // namespace

std::string Elm327Client::command(std::string_view cmd)
{
    // Anything still unread belongs to an earlier command that timed out.
    carry_.clear();
    while (stream_->read_some(std::chrono::milliseconds{0})) {
    }

    sent_.emplace_back(cmd);
    stream_->write(std::string(cmd) + '\r');

    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::string raw;
    std::size_t prompt;
    while ((prompt = raw.find('>')) == std::string::npos) {
        const auto left =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            throw Error(Errc::TimedOut, "no prompt after '" + std::string(cmd) + "'");
        }
        auto chunk = stream_->read_some(left);
        if (chunk) raw += *chunk;
    }
    carry_ = raw.substr(prompt + 1);
    raw.resize(prompt + 1);
    transcript_.push_back(raw);

    std::vector<std::string> lines;
    std::size_t start = 0;
    const auto body = std::string_view(raw).substr(0, prompt);
    while (start <= body.size()) {
        auto end = body.find_first_of("\r\n", start);
        if (end == std::string_view::npos) end = body.size();
        auto line = body.substr(start, end - start);
        if (!squash(line).empty()) lines.emplace_back(line);
        start = end + 1;
    }
    if (!lines.empty() && squash(lines.front()) == squash(cmd)) lines.erase(lines.begin());

    std::string joined;
    for (const auto& l : lines) {
        if (!joined.empty()) joined.push_back('\n');
        joined += l;
    }
    return joined;
}

std::string run_init_handshake(Elm327Client& client)
{
    const auto reset = client.command("ATZ");
    if (reset.find("ELM327") == std::string::npos) {
        throw Error(Errc::UnexpectedReply, "ATZ reply lacks the ELM327 banner: '" + reset + "'");
    }
    if (const auto r = client.command("ATSP0"); r != "OK") {
        throw Error(Errc::UnexpectedReply, "ATSP0 replied '" + r + "'");
    }
    auto search = client.command("0100");
    try {
        codec::parse_response(search, codec::ObdRequest(codec::kCurrentDataMode, codec::Pid::SupportedPids));
    } catch (const Error& e) {
        throw Error(Errc::UnexpectedReply, "0100 replied '" + search + "': " + e.what());
    }
    return search;
}

} // namespace obdfleet::agent
