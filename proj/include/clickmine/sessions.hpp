#pragma once
#ifndef CLICKMINE_SESSIONS_HPP
#define CLICKMINE_SESSIONS_HPP

// Inactivity-gap sessionization, BREAK-joined traces and corpus statistics.

#include "clickmine/action_map.hpp"
#include "clickmine/error.hpp"
#include "clickmine/log_ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace clickmine {

struct Event {
    std::string user;
    Timestamp timestamp{};
    LabelId label = 0;
    std::string ontology;  // empty when the action is not attributed to a resource

    friend bool operator==(const Event&, const Event&) = default;
};

struct Session {
    std::string user;
    std::vector<Event> events;
    Timestamp start{};
    Timestamp end{};

    [[nodiscard]] std::int64_t duration_seconds() const { return (end - start).count(); }
};

inline constexpr double default_gap_minutes = 30.0;

/// Splits chronologically ordered events into sessions: a gap of at least
/// `gap_minutes` (or a change of user) closes the current session. Input
/// must be grouped by user with non-decreasing timestamps inside each group.
inline std::vector<Session> sessionize(std::span<const Event> events, double gap_minutes = default_gap_minutes)
{
    if (!(gap_minutes > 0.0)) {
        throw Error(Errc::invalid_argument, "gap_minutes must be positive");
    }
    const double gap_seconds = gap_minutes * 60.0;
    std::vector<Session> sessions;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        bool fresh = sessions.empty() || sessions.back().user != e.user;
        if (!fresh) {
            auto delta = (e.timestamp - sessions.back().end).count();
            if (delta < 0) {
                throw Error(Errc::non_monotonic_input,
                            "timestamps decrease for user " + e.user + " at event " + std::to_string(i));
            }
            fresh = static_cast<double>(delta) >= gap_seconds;
        }
        if (fresh) {
            sessions.push_back(Session{e.user, {}, e.timestamp, e.timestamp});
        }
        sessions.back().events.push_back(e);
        sessions.back().end = e.timestamp;
    }
    return sessions;
}

struct SessionSpan {
    Timestamp start{};
    Timestamp end{};
    std::size_t size = 0;

    friend bool operator==(const SessionSpan&, const SessionSpan&) = default;
};

struct UserTrace {
    std::string user;
    std::vector<LabelId> sequence;       // BREAK between sessions
    std::vector<std::string> resources;  // aligned with sequence; "" when unattributed
    std::vector<SessionSpan> sessions;

    [[nodiscard]] std::size_t session_count() const noexcept { return sessions.size(); }

    /// Number of real actions, i.e. tokens other than BREAK.
    [[nodiscard]] std::size_t action_count() const noexcept
    {
        std::size_t total = 0;
        for (const auto& s : sessions) total += s.size;
        return total;
    }

    friend bool operator==(const UserTrace&, const UserTrace&) = default;
};

/// Joins one user's sessions with a single BREAK between consecutive ones.
inline UserTrace build_user_trace(std::span<const Session> sessions, LabelId break_id)
{
    if (sessions.empty()) {
        throw Error(Errc::empty_input, "build_user_trace needs at least one session");
    }
    UserTrace trace;
    trace.user = sessions.front().user;
    for (const auto& s : sessions) {
        if (s.events.empty()) {
            throw Error(Errc::empty_input, "session without events for user " + s.user);
        }
        if (!trace.sequence.empty()) {
            trace.sequence.push_back(break_id);
            trace.resources.emplace_back();
        }
        for (const auto& e : s.events) {
            trace.sequence.push_back(e.label);
            trace.resources.push_back(e.ontology);
        }
        trace.sessions.push_back({s.start, s.end, s.events.size()});
    }
    return trace;
}

/// Builds one trace per user from sessions grouped by user (as returned by
/// sessionize on user-grouped events).
inline std::vector<UserTrace> build_user_traces(std::span<const Session> sessions, LabelId break_id)
{
    std::vector<UserTrace> traces;
    std::size_t begin = 0;
    while (begin < sessions.size()) {
        std::size_t end = begin + 1;
        while (end < sessions.size() && sessions[end].user == sessions[begin].user) {
            ++end;
        }
        traces.push_back(build_user_trace(sessions.subspan(begin, end - begin), break_id));
        begin = end;
    }
    return traces;
}

using Histogram = std::map<std::int64_t, std::uint64_t>;

inline std::uint64_t histogram_total(const Histogram& h)
{
    std::uint64_t total = 0;
    for (const auto& [value, count] : h) total += count;
    return total;
}

inline std::int64_t histogram_weighted_sum(const Histogram& h)
{
    std::int64_t total = 0;
    for (const auto& [value, count] : h) total += value * static_cast<std::int64_t>(count);
    return total;
}

/// Median of the multiset a histogram encodes; mean of the two middle values
/// for an even count, 0 for an empty histogram.
inline double histogram_median(const Histogram& h)
{
    std::uint64_t n = histogram_total(h);
    if (n == 0) {
        return 0.0;
    }
    auto nth = [&](std::uint64_t k) {
        std::uint64_t seen = 0;
        for (const auto& [value, count] : h) {
            seen += count;
            if (seen > k) return value;
        }
        return h.rbegin()->first;
    };
    if (n % 2 == 1) {
        return static_cast<double>(nth(n / 2));
    }
    return 0.5 * static_cast<double>(nth(n / 2 - 1) + nth(n / 2));
}

struct UsageStats {
    Histogram inter_request_seconds;  // every consecutive pair of one user's requests
    Histogram requests_per_user;
    Histogram ontologies_per_user;    // distinct attributed resources per user
    Histogram requests_per_session;
    Histogram session_durations;      // seconds; a 1-event session lasts 0 s
    std::uint64_t user_count = 0;
    std::uint64_t event_count = 0;
    std::uint64_t session_count = 0;
    std::uint64_t single_request_sessions = 0;

    [[nodiscard]] double mean_session_duration() const
    {
        return session_count == 0 ? 0.0
                                  : static_cast<double>(histogram_weighted_sum(session_durations)) /
                                        static_cast<double>(session_count);
    }
    [[nodiscard]] double median_session_duration() const { return histogram_median(session_durations); }

    /// Associative merge of statistics computed over disjoint user sets.
    UsageStats& merge(const UsageStats& other)
    {
        auto add = [](Histogram& into, const Histogram& from) {
            for (const auto& [v, c] : from) into[v] += c;
        };
        add(inter_request_seconds, other.inter_request_seconds);
        add(requests_per_user, other.requests_per_user);
        add(ontologies_per_user, other.ontologies_per_user);
        add(requests_per_session, other.requests_per_session);
        add(session_durations, other.session_durations);
        user_count += other.user_count;
        event_count += other.event_count;
        session_count += other.session_count;
        single_request_sessions += other.single_request_sessions;
        return *this;
    }

    friend bool operator==(const UsageStats&, const UsageStats&) = default;
};

/// Corpus statistics over sessions grouped by user in chronological order.
inline UsageStats compute_usage_stats(std::span<const Session> sessions)
{
    UsageStats st;
    std::size_t i = 0;
    while (i < sessions.size()) {
        const std::string& user = sessions[i].user;
        std::uint64_t requests = 0;
        std::set<std::string> ontologies;
        const Event* prev = nullptr;
        for (; i < sessions.size() && sessions[i].user == user; ++i) {
            const Session& s = sessions[i];
            ++st.session_count;
            st.requests_per_session[static_cast<std::int64_t>(s.events.size())] += 1;
            st.session_durations[s.duration_seconds()] += 1;
            if (s.events.size() == 1) {
                ++st.single_request_sessions;
            }
            for (const auto& e : s.events) {
                if (prev != nullptr) {
                    st.inter_request_seconds[(e.timestamp - prev->timestamp).count()] += 1;
                }
                if (!e.ontology.empty()) {
                    ontologies.insert(e.ontology);
                }
                prev = &e;
                ++requests;
            }
        }
        ++st.user_count;
        st.event_count += requests;
        st.requests_per_user[static_cast<std::int64_t>(requests)] += 1;
        st.ontologies_per_user[static_cast<std::int64_t>(ontologies.size())] += 1;
    }
    return st;
}

}  // namespace clickmine

#endif  // CLICKMINE_SESSIONS_HPP
