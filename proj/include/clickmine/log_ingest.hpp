#pragma once
#ifndef CLICKMINE_LOG_INGEST_HPP
#define CLICKMINE_LOG_INGEST_HPP

// Apache access-log parsing and bot/asset filtering.

#include "clickmine/error.hpp"

#include <boost/regex.hpp>

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clickmine {

using Timestamp = std::chrono::sys_seconds;

enum class LogFormat { combined, common };

struct RequestRecord {
    std::string ip;
    std::string remote_user;  // the %u field; empty when "-"
    Timestamp timestamp{};
    std::string method;
    std::string path;   // percent-decoded, always starts with '/'
    std::string query;  // raw, without the leading '?'
    int status = 0;
    std::string useragent;

    friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

namespace detail {

inline constexpr std::array<std::string_view, 12> month_names{
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

template <typename Int>
bool parse_fixed_digits(std::string_view s, Int& out)
{
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

inline int hex_value(char c) noexcept
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// Reads a double-quoted field starting at s[pos] == '"'. Apache escapes '"'
// and '\' with a backslash and non-printables as \xhh.
inline bool read_quoted(std::string_view s, std::size_t& pos, std::string& out)
{
    if (pos >= s.size() || s[pos] != '"') {
        return false;
    }
    ++pos;
    out.clear();
    while (pos < s.size()) {
        char c = s[pos];
        if (c == '"') {
            ++pos;
            return true;
        }
        if (c == '\\' && pos + 1 < s.size()) {
            char n = s[pos + 1];
            if (n == '"' || n == '\\') {
                out.push_back(n);
                pos += 2;
                continue;
            }
            if (n == 'x' && pos + 3 < s.size()) {
                int hi = hex_value(s[pos + 2]);
                int lo = hex_value(s[pos + 3]);
                if (hi >= 0 && lo >= 0) {
                    out.push_back(static_cast<char>(hi * 16 + lo));
                    pos += 4;
                    continue;
                }
            }
        }
        out.push_back(c);
        ++pos;
    }
    return false;
}

inline bool read_token(std::string_view s, std::size_t& pos, std::string_view& out)
{
    if (pos >= s.size()) {
        return false;
    }
    std::size_t end = s.find(' ', pos);
    if (end == std::string_view::npos) {
        end = s.size();
    }
    if (end == pos) {
        return false;
    }
    out = s.substr(pos, end - pos);
    pos = end;
    return true;
}

inline bool skip_space(std::string_view s, std::size_t& pos)
{
    if (pos >= s.size() || s[pos] != ' ') {
        return false;
    }
    while (pos < s.size() && s[pos] == ' ') {
        ++pos;
    }
    return true;
}

inline void append_escaped(std::string& out, std::string_view text)
{
    static constexpr char digits[] = "0123456789abcdef";
    for (unsigned char c : text) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
            out.push_back(static_cast<char>(c));
        } else if (c < 0x20 || c == 0x7f) {
            out += "\\x";
            out.push_back(digits[c >> 4]);
            out.push_back(digits[c & 0xf]);
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
}

}  // namespace detail

/// Decodes %XY escapes; malformed escapes are kept literally.
inline std::string percent_decode(std::string_view in)
{
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == '%' && i + 2 < in.size()) {
            int hi = detail::hex_value(in[i + 1]);
            int lo = detail::hex_value(in[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(in[i]);
    }
    return out;
}

/// Encodes a decoded path so that percent_decode() restores it exactly.
inline std::string percent_encode_path(std::string_view in)
{
    static constexpr char digits[] = "0123456789ABCDEF";
    static constexpr std::string_view safe = "-._~/!$&'()*+,;=:@";
    std::string out;
    out.reserve(in.size());
    for (unsigned char c : in) {
        if (std::isalnum(c) != 0 || safe.find(static_cast<char>(c)) != std::string_view::npos) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(digits[c >> 4]);
            out.push_back(digits[c & 0xf]);
        }
    }
    return out;
}

/// Parses the bracket payload "14/Mar/2016:09:07:32 -0700" into a UTC instant.
inline std::optional<Timestamp> parse_apache_time(std::string_view s)
{
    using namespace std::chrono;
    // dd/Mon/yyyy:HH:MM:SS +zzzz
    if (s.size() != 26 || s[2] != '/' || s[6] != '/' || s[11] != ':' || s[14] != ':' ||
        s[17] != ':' || s[20] != ' ' || (s[21] != '+' && s[21] != '-')) {
        return std::nullopt;
    }
    unsigned d = 0;
    int y = 0;
    int hh = 0, mm = 0, ss = 0, oh = 0, om = 0;
    if (!detail::parse_fixed_digits(s.substr(0, 2), d) ||
        !detail::parse_fixed_digits(s.substr(7, 4), y) ||
        !detail::parse_fixed_digits(s.substr(12, 2), hh) ||
        !detail::parse_fixed_digits(s.substr(15, 2), mm) ||
        !detail::parse_fixed_digits(s.substr(18, 2), ss) ||
        !detail::parse_fixed_digits(s.substr(22, 2), oh) ||
        !detail::parse_fixed_digits(s.substr(24, 2), om)) {
        return std::nullopt;
    }
    auto mon = std::find(detail::month_names.begin(), detail::month_names.end(), s.substr(3, 3));
    if (mon == detail::month_names.end()) {
        return std::nullopt;
    }
    unsigned m = static_cast<unsigned>(mon - detail::month_names.begin()) + 1;
    year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59 || oh > 23 || om > 59) {
        return std::nullopt;
    }
    int offset_sec = (oh * 3600 + om * 60) * (s[21] == '-' ? -1 : 1);
    auto local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
    return Timestamp{local - seconds{offset_sec}};
}

/// Formats a UTC instant as Apache local time with the given offset.
inline std::string format_apache_time(Timestamp ts, int utc_offset_minutes = 0)
{
    using namespace std::chrono;
    auto local = ts + minutes{utc_offset_minutes};
    auto dp = floor<days>(local);
    year_month_day ymd{dp};
    hh_mm_ss<seconds> tod{local - dp};
    int off = utc_offset_minutes < 0 ? -utc_offset_minutes : utc_offset_minutes;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%02u/%s/%04d:%02d:%02d:%02d %c%02d%02d",
                  static_cast<unsigned>(ymd.day()),
                  detail::month_names[static_cast<unsigned>(ymd.month()) - 1].data(),
                  static_cast<int>(ymd.year()), static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()),
                  utc_offset_minutes < 0 ? '-' : '+', off / 60, off % 60);
    return buf;
}

/// ISO-8601 UTC rendering used in reports and trace files.
inline std::string format_iso8601(Timestamp ts)
{
    using namespace std::chrono;
    auto dp = floor<days>(ts);
    year_month_day ymd{dp};
    hh_mm_ss<seconds> tod{ts - dp};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
    return buf;
}

enum class ParseStatus { ok, malformed, bad_timestamp };

/// Non-throwing parse used by the bulk readers. On failure `out` is unspecified.
inline ParseStatus parse_log_line_into(std::string_view line, LogFormat format, RequestRecord& out)
{
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
        line.remove_suffix(1);
    }
    std::size_t pos = 0;
    std::string_view host, ident, user;
    if (!detail::read_token(line, pos, host) || !detail::skip_space(line, pos) ||
        !detail::read_token(line, pos, ident) || !detail::skip_space(line, pos) ||
        !detail::read_token(line, pos, user) || !detail::skip_space(line, pos)) {
        return ParseStatus::malformed;
    }
    if (pos >= line.size() || line[pos] != '[') {
        return ParseStatus::malformed;
    }
    std::size_t close = line.find(']', pos);
    if (close == std::string_view::npos) {
        return ParseStatus::malformed;
    }
    auto ts = parse_apache_time(line.substr(pos + 1, close - pos - 1));
    pos = close + 1;
    if (!detail::skip_space(line, pos)) {
        return ParseStatus::malformed;
    }
    std::string request;
    if (!detail::read_quoted(line, pos, request) || !detail::skip_space(line, pos)) {
        return ParseStatus::malformed;
    }
    std::string_view status_tok, bytes_tok;
    if (!detail::read_token(line, pos, status_tok) || !detail::skip_space(line, pos) ||
        !detail::read_token(line, pos, bytes_tok)) {
        return ParseStatus::malformed;
    }
    int status = 0;
    if (status_tok.size() != 3 || !detail::parse_fixed_digits(status_tok, status)) {
        return ParseStatus::malformed;
    }
    std::size_t bytes = 0;
    if (bytes_tok != "-" && !detail::parse_fixed_digits(bytes_tok, bytes)) {
        return ParseStatus::malformed;
    }
    out.useragent.clear();
    if (format == LogFormat::combined) {
        std::string referer;
        if (!detail::skip_space(line, pos) || !detail::read_quoted(line, pos, referer) ||
            !detail::skip_space(line, pos) || !detail::read_quoted(line, pos, out.useragent)) {
            return ParseStatus::malformed;
        }
    }

    // Request line: METHOD SP target [SP protocol]
    std::string_view req = request;
    std::size_t sp1 = req.find(' ');
    if (sp1 == std::string_view::npos || sp1 == 0) {
        return ParseStatus::malformed;
    }
    std::string_view method = req.substr(0, sp1);
    std::string_view target = req.substr(sp1 + 1);
    std::size_t sp2 = target.rfind(' ');
    if (sp2 != std::string_view::npos && target.substr(sp2 + 1).starts_with("HTTP/")) {
        target = target.substr(0, sp2);
    }
    for (char c : method) {
        if (c < 'A' || c > 'Z') {
            return ParseStatus::malformed;
        }
    }
    if (auto scheme = target.find("://"); scheme != std::string_view::npos && !target.starts_with('/')) {
        std::size_t slash = target.find('/', scheme + 3);
        target = slash == std::string_view::npos ? std::string_view{"/"} : target.substr(slash);
    }
    if (target.empty() || target.front() != '/') {
        return ParseStatus::malformed;
    }
    if (auto hash = target.find('#'); hash != std::string_view::npos) {
        target = target.substr(0, hash);
    }
    std::string_view raw_path = target;
    std::string_view query;
    if (auto q = target.find('?'); q != std::string_view::npos) {
        raw_path = target.substr(0, q);
        query = target.substr(q + 1);
    }
    if (!ts) {
        return ParseStatus::bad_timestamp;
    }

    out.ip.assign(host);
    out.remote_user = user == "-" ? std::string{} : std::string{user};
    out.timestamp = *ts;
    out.method.assign(method);
    out.path = percent_decode(raw_path);
    out.query.assign(query);
    out.status = status;
    return ParseStatus::ok;
}

/// Parses one access-log line. Throws Error{malformed_line} or
/// Error{invalid_timestamp}; bulk callers use parse_log_line_into instead.
inline RequestRecord parse_log_line(std::string_view line, LogFormat format = LogFormat::combined)
{
    RequestRecord rec;
    switch (parse_log_line_into(line, format, rec)) {
    case ParseStatus::ok: return rec;
    case ParseStatus::bad_timestamp:
        throw Error(Errc::invalid_timestamp, "unparsable timestamp in: " + std::string(line.substr(0, 200)));
    case ParseStatus::malformed: break;
    }
    throw Error(Errc::malformed_line, "cannot parse: " + std::string(line.substr(0, 200)));
}

/// Renders a record in Apache combined (or common) format. Bytes and referer
/// are not part of the record and are written as "-".
inline std::string format_log_line(const RequestRecord& r, int utc_offset_minutes = 0,
                                   LogFormat format = LogFormat::combined)
{
    std::string line;
    line.reserve(128 + r.path.size() + r.query.size() + r.useragent.size());
    line += r.ip;
    line += " - ";
    line += r.remote_user.empty() ? std::string_view{"-"} : std::string_view{r.remote_user};
    line += " [";
    line += format_apache_time(r.timestamp, utc_offset_minutes);
    line += "] \"";
    std::string target = percent_encode_path(r.path);
    if (!r.query.empty()) {
        target += '?';
        target += r.query;
    }
    detail::append_escaped(line, r.method + " " + target + " HTTP/1.1");
    line += "\" ";
    line += std::to_string(r.status);
    line += " -";
    if (format == LogFormat::combined) {
        line += " \"-\" \"";
        detail::append_escaped(line, r.useragent);
        line += '"';
    }
    return line;
}

// ---------------------------------------------------------------------------
// Filtering

/// An IPv4 or IPv6 network; a bare address is a /32 or /128.
class IpNetwork {
public:
    static std::optional<IpNetwork> parse(std::string_view text)
    {
        IpNetwork net;
        std::string addr(text);
        int prefix = -1;
        if (auto slash = addr.find('/'); slash != std::string::npos) {
            if (!detail::parse_fixed_digits(std::string_view(addr).substr(slash + 1), prefix)) {
                return std::nullopt;
            }
            addr.resize(slash);
        }
        if (auto v4 = parse_address(addr, net.bytes_)) {
            net.v6_ = *v4 == 6;
        } else {
            return std::nullopt;
        }
        int max_prefix = net.v6_ ? 128 : 32;
        if (prefix < 0) {
            prefix = max_prefix;
        }
        if (prefix > max_prefix) {
            return std::nullopt;
        }
        net.prefix_ = prefix;
        return net;
    }

    [[nodiscard]] bool contains(std::string_view ip) const
    {
        std::array<unsigned char, 16> other{};
        auto family = parse_address(std::string(ip), other);
        if (!family || (*family == 6) != v6_) {
            return false;
        }
        int full = prefix_ / 8;
        int rem = prefix_ % 8;
        if (!std::equal(bytes_.begin(), bytes_.begin() + full, other.begin())) {
            return false;
        }
        if (rem == 0) {
            return true;
        }
        auto mask = static_cast<unsigned char>(0xff << (8 - rem));
        return (bytes_[full] & mask) == (other[full] & mask);
    }

private:
    static std::optional<int> parse_address(const std::string& text, std::array<unsigned char, 16>& out)
    {
        out.fill(0);
        if (inet_pton(AF_INET, text.c_str(), out.data()) == 1) {
            return 4;
        }
        if (inet_pton(AF_INET6, text.c_str(), out.data()) == 1) {
            return 6;
        }
        return std::nullopt;
    }

    std::array<unsigned char, 16> bytes_{};
    int prefix_ = 0;
    bool v6_ = false;
};

/// One entry of a line-oriented list file, with its 1-based line number.
struct ListEntry {
    std::size_t line = 0;
    std::string text;
};

/// Splits list-file text into entries; blank lines and '#' comments are skipped.
inline std::vector<ListEntry> parse_list_text(std::string_view text)
{
    std::vector<ListEntry> entries;
    std::size_t line_no = 0;
    while (!text.empty()) {
        std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front())) != 0) {
            line.remove_prefix(1);
        }
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())) != 0) {
            line.remove_suffix(1);
        }
        if (!line.empty()) {
            entries.push_back({line_no, std::string(line)});
        }
    }
    return entries;
}

enum class FilterVerdict { keep, useragent, ip, asset };

class FilterConfig {
public:
    FilterConfig() = default;

    /// Compiles the three list texts. Throws Error{bad_pattern} naming the
    /// list and line of the first entry that does not compile.
    static FilterConfig compile(std::string_view useragent_list, std::string_view ip_list,
                                std::string_view asset_list)
    {
        FilterConfig cfg;
        for (auto& e : parse_list_text(useragent_list)) {
            std::string lowered = e.text;
            std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            cfg.useragent_blacklist_.push_back(std::move(lowered));
        }
        for (auto& e : parse_list_text(ip_list)) {
            auto net = IpNetwork::parse(e.text);
            if (!net) {
                throw Error(Errc::bad_pattern,
                            "ip blacklist line " + std::to_string(e.line) + ": '" + e.text + "'");
            }
            cfg.ip_blacklist_.push_back(*net);
        }
        for (auto& e : parse_list_text(asset_list)) {
            try {
                cfg.asset_patterns_.emplace_back(e.text, boost::regex::perl);
            } catch (const boost::regex_error& err) {
                throw Error(Errc::bad_pattern, "asset pattern line " + std::to_string(e.line) +
                                                   ": '" + e.text + "': " + err.what());
            }
        }
        return cfg;
    }

    [[nodiscard]] FilterVerdict classify(const RequestRecord& r) const
    {
        if (!useragent_blacklist_.empty() && !r.useragent.empty()) {
            thread_local std::string lowered;
            lowered.resize(r.useragent.size());
            std::transform(r.useragent.begin(), r.useragent.end(), lowered.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            for (const auto& needle : useragent_blacklist_) {
                if (lowered.find(needle) != std::string::npos) {
                    return FilterVerdict::useragent;
                }
            }
        }
        for (const auto& net : ip_blacklist_) {
            if (net.contains(r.ip)) {
                return FilterVerdict::ip;
            }
        }
        for (const auto& re : asset_patterns_) {
            if (boost::regex_search(r.path, re)) {
                return FilterVerdict::asset;
            }
        }
        return FilterVerdict::keep;
    }

    [[nodiscard]] bool accepts(const RequestRecord& r) const { return classify(r) == FilterVerdict::keep; }

    [[nodiscard]] const std::vector<std::string>& useragent_blacklist() const { return useragent_blacklist_; }
    [[nodiscard]] std::size_t ip_blacklist_size() const { return ip_blacklist_.size(); }
    [[nodiscard]] std::size_t asset_pattern_count() const { return asset_patterns_.size(); }

private:
    std::vector<std::string> useragent_blacklist_;  // lowercase substrings
    std::vector<IpNetwork> ip_blacklist_;
    std::vector<boost::regex> asset_patterns_;
};

/// Order-preserving filter.
inline std::vector<RequestRecord> filter_requests(std::span<const RequestRecord> records,
                                                  const FilterConfig& cfg)
{
    std::vector<RequestRecord> kept;
    kept.reserve(records.size());
    std::copy_if(records.begin(), records.end(), std::back_inserter(kept),
                 [&](const RequestRecord& r) { return cfg.accepts(r); });
    return kept;
}

}  // namespace clickmine

#endif  // CLICKMINE_LOG_INGEST_HPP
