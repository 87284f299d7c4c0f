#include "support.hpp"

#include <gtest/gtest.h>

namespace cm = clickmine;
using namespace testing_support;

namespace {

constexpr std::string_view kSummaryLine =
    R"(1.2.3.4 - - [14/Mar/2016:09:07:32 -0700] "GET /ontologies/MCCV HTTP/1.1" 200 512 "-" "Mozilla/5.0")";

cm::Errc parse_error(std::string_view line)
{
    try {
        (void)cm::parse_log_line(line);
    } catch (const cm::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for: " << line;
    return cm::Errc::io;
}

}  // namespace

TEST(ParseLogLine, SummaryRequest)
{
    auto r = cm::parse_log_line(kSummaryLine);
    EXPECT_EQ(r.ip, "1.2.3.4");
    EXPECT_EQ(r.method, "GET");
    EXPECT_EQ(r.path, "/ontologies/MCCV");
    EXPECT_EQ(r.query, "");
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.useragent, "Mozilla/5.0");
    EXPECT_EQ(cm::format_iso8601(r.timestamp), "2016-03-14T16:07:32Z");
}

TEST(ParseLogLine, GarbageIsMalformed)
{
    EXPECT_EQ(parse_error("garbage without quotes"), cm::Errc::malformed_line);
    EXPECT_EQ(parse_error(""), cm::Errc::malformed_line);
    EXPECT_EQ(parse_error(R"(1.2.3.4 - - [14/Mar/2016:09:07:32 -0700] "GET /" 200)"), cm::Errc::malformed_line);
}

TEST(ParseLogLine, BadTimestamp)
{
    EXPECT_EQ(parse_error(R"(1.2.3.4 - - [14/Foo/2016:09:07:32 -0700] "GET / HTTP/1.1" 200 1 "-" "x")"),
              cm::Errc::invalid_timestamp);
    EXPECT_EQ(parse_error(R"(1.2.3.4 - - [31/Feb/2016:09:07:32 -0700] "GET / HTTP/1.1" 200 1 "-" "x")"),
              cm::Errc::invalid_timestamp);
}

TEST(ParseLogLine, DecodesPathOnly)
{
    auto r = cm::parse_log_line(
        R"(1.2.3.4 - - [14/Mar/2016:09:07:46 -0700] "GET /login?redirect=http%3A%2F%2Fexample.org%2F HTTP/1.1" 200 1 "-" "x")");
    EXPECT_EQ(r.path, "/login");
    EXPECT_EQ(r.query, "redirect=http%3A%2F%2Fexample.org%2F");

    auto s = cm::parse_log_line(R"(1.2.3.4 - - [14/Mar/2016:09:07:46 +0000] "GET /ontologies/A%20B HTTP/1.1" 200 1 "-" "x")");
    EXPECT_EQ(s.path, "/ontologies/A B");
}

TEST(ParseLogLine, CommonFormatHasNoAgent)
{
    auto r = cm::parse_log_line(R"(1.2.3.4 - bob [14/Mar/2016:09:07:32 -0700] "GET / HTTP/1.0" 304 -)",
                                cm::LogFormat::common);
    EXPECT_EQ(r.remote_user, "bob");
    EXPECT_EQ(r.status, 304);
    EXPECT_TRUE(r.useragent.empty());
}

TEST(ParseLogLine, SynthRecordsRoundTrip)
{
    auto log = small_log(11, 10, 0.3);
    ASSERT_GT(log.records.size(), 500u);
    for (const auto& rec : log.records) {
        auto line = cm::format_log_line(rec, log.utc_offset_minutes);
        ASSERT_EQ(cm::parse_log_line(line), rec) << line;
    }
}

TEST(ParseLogLine, ParseFormatParseIsStable)
{
    const std::vector<std::string> lines = {
        std::string(kSummaryLine),
        R"(::1 - - [01/Jan/2016:00:00:00 +0530] "POST /accounts HTTP/1.1" 302 0 "http://x/" "agent \"quoted\" \\ slash")",
        R"(10.0.0.9 - - [29/Feb/2016:23:59:59 -1200] "GET /search?q=heart%20attack HTTP/1.1" 200 77 "-" "curl/7.1")",
    };
    for (const auto& l : lines) {
        auto first = cm::parse_log_line(l);
        for (int offset : {0, -420, 330}) {
            EXPECT_EQ(cm::parse_log_line(cm::format_log_line(first, offset)), first) << l;
        }
    }
}

TEST(FilterRequests, CrawlerAgentDropped)
{
    auto cfg = cm::FilterConfig::compile("googlebot\n", "", "");
    cm::RequestRecord r;
    r.ip = "1.2.3.4";
    r.path = "/";
    r.useragent = "Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)";
    EXPECT_EQ(cfg.classify(r), cm::FilterVerdict::useragent);
    r.useragent = "Mozilla/5.0";
    EXPECT_EQ(cfg.classify(r), cm::FilterVerdict::keep);
}

TEST(FilterRequests, EmptyConfigKeepsEverything)
{
    cm::FilterConfig identity = cm::FilterConfig::compile("", "", "");
    auto log = small_log(3, 5, 0.2);
    auto kept = cm::filter_requests(log.records, identity);
    EXPECT_EQ(kept, log.records);
}

TEST(FilterRequests, IpBlocks)
{
    auto cfg = cm::FilterConfig::compile("", "66.249.64.0/19\n2001:db8::/32\n192.0.2.7\n", "");
    cm::RequestRecord r;
    r.path = "/";
    for (auto [ip, dropped] : std::vector<std::pair<std::string, bool>>{{"66.249.64.1", true},
                                                                         {"66.249.95.255", true},
                                                                         {"66.249.96.0", false},
                                                                         {"2001:db8::1", true},
                                                                         {"2001:db9::1", false},
                                                                         {"192.0.2.7", true},
                                                                         {"192.0.2.8", false}}) {
        r.ip = ip;
        EXPECT_EQ(cfg.classify(r) == cm::FilterVerdict::ip, dropped) << ip;
    }
    EXPECT_THROW((void)cm::FilterConfig::compile("", "300.1.1.1\n", ""), cm::Error);
    EXPECT_THROW((void)cm::FilterConfig::compile("", "", "([\n"), cm::Error);
}

TEST(FilterRequests, AssetsDropped)
{
    const auto& cfg = default_filter();
    cm::RequestRecord r;
    r.ip = "10.0.0.1";
    r.useragent = "Mozilla/5.0";
    for (std::string p : {"/favicon.ico", "/assets/app.js", "/images/logo.png", "/ajax/classes/label"}) {
        r.path = p;
        EXPECT_EQ(cfg.classify(r), cm::FilterVerdict::asset) << p;
    }
    r.path = "/ontologies/GO";
    EXPECT_EQ(cfg.classify(r), cm::FilterVerdict::keep);
}

TEST(FilterRequests, Idempotent)
{
    auto log = small_log(5, 10, 0.3);
    auto once = cm::filter_requests(log.records, default_filter());
    auto twice = cm::filter_requests(once, default_filter());
    EXPECT_EQ(once, twice);
}

TEST(FilterRequests, PreservesOrder)
{
    auto log = small_log(6, 10, 0.3);
    auto kept = cm::filter_requests(log.records, default_filter());
    std::size_t pos = 0;
    for (const auto& k : kept) {
        while (pos < log.records.size() && !(log.records[pos] == k)) ++pos;
        ASSERT_LT(pos, log.records.size());
        ++pos;
    }
}

TEST(FilterRequests, BotShareLeavesHumanLines)
{
    auto log = small_log(2016, 30, 0.3);
    const auto& t = log.truth;
    EXPECT_GT(t.bot_lines, 0u);
    EXPECT_NEAR(static_cast<double>(t.bot_lines) / static_cast<double>(t.total_lines), 0.3, 0.01);
    auto kept = cm::filter_requests(log.records, default_filter());
    EXPECT_EQ(kept.size(), t.human_lines);
}
