#pragma once
#ifndef CLICKMINE_IO_HPP
#define CLICKMINE_IO_HPP

// File formats shared by the CLI subcommands: raw log text (plain or gzip),
// traces as JSON lines, and the CSV tables.

#include "clickmine/action_map.hpp"
#include "clickmine/cluster.hpp"
#include "clickmine/error.hpp"
#include "clickmine/sessions.hpp"

#include <json.hpp>
#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace clickmine {

namespace fs = std::filesystem;

/// Line views into one contiguous buffer.
struct LineBuffer {
    std::string data;
    std::vector<std::string_view> lines;
};

/// Reads a file that may be gzip-compressed (detected by content).
inline std::string read_file(const fs::path& path)
{
    gzFile f = gzopen(path.string().c_str(), "rb");
    if (f == nullptr) {
        throw Error(Errc::io, "cannot open " + path.string());
    }
    gzbuffer(f, 1 << 18);
    std::string out;
    std::vector<char> chunk(1 << 20);
    for (;;) {
        const int got = gzread(f, chunk.data(), static_cast<unsigned>(chunk.size()));
        if (got < 0) {
            int errnum = 0;
            std::string msg = gzerror(f, &errnum);
            gzclose(f);
            throw Error(Errc::io, "read error in " + path.string() + ": " + msg);
        }
        if (got == 0) break;
        out.append(chunk.data(), static_cast<std::size_t>(got));
    }
    gzclose(f);
    return out;
}

/// Splits on '\n' (a trailing '\r' is dropped); empty lines are skipped.
inline void split_lines(LineBuffer& buf)
{
    buf.lines.clear();
    std::string_view all = buf.data;
    std::size_t pos = 0;
    while (pos < all.size()) {
        std::size_t end = all.find('\n', pos);
        if (end == std::string_view::npos) end = all.size();
        std::string_view line = all.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) buf.lines.push_back(line);
        pos = end + 1;
    }
}

inline LineBuffer read_log_files(const std::vector<fs::path>& paths)
{
    LineBuffer buf;
    for (const auto& p : paths) {
        buf.data += read_file(p);
        if (!buf.data.empty() && buf.data.back() != '\n') buf.data += '\n';
    }
    split_lines(buf);
    return buf;
}

inline std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(Errc::io, "cannot write " + path.string());
    }
    return out;
}

inline void write_text(const fs::path& path, std::string_view text)
{
    auto out = open_output(path);
    out << text;
}

inline void write_json(const fs::path& path, const nlohmann::json& j)
{
    write_text(path, j.dump(2) + "\n");
}

inline nlohmann::json read_json(const fs::path& path)
{
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::io, path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double v)
{
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// Splits CSV text into rows of fields; quoted fields may contain commas,
/// doubled quotes and newlines.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline double parse_double(const std::string& s, const std::string& where)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw Error(Errc::io, where + ": '" + s + "' is not a number");
    }
    return v;
}

inline std::size_t parse_index(const std::string& s, const std::string& where)
{
    std::size_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw Error(Errc::io, where + ": '" + s + "' is not a non-negative integer");
    }
    return v;
}

inline void write_histogram_csv(const fs::path& path, const Histogram& h)
{
    auto out = open_output(path);
    out << "value,count\n";
    for (const auto& [v, c] : h) out << v << ',' << c << '\n';
}

/// Header "user,<labels...>", one row per user.
inline void write_features_csv(const fs::path& path, const FeatureMatrix& F, const ActionVocabulary& vocab)
{
    if (F.cols() != vocab.size()) {
        throw Error(Errc::dimension_mismatch, "feature width does not match the vocabulary");
    }
    auto out = open_output(path);
    out << "user";
    for (const auto& l : vocab.labels()) out << ',' << csv_field(l.name);
    out << '\n';
    for (std::size_t i = 0; i < F.rows(); ++i) {
        out << csv_field(F.user_ids[i]);
        for (Eigen::Index j = 0; j < F.X.cols(); ++j) out << ',' << format_double(F.X(static_cast<Eigen::Index>(i), j));
        out << '\n';
    }
}

struct FeatureTable {
    std::vector<std::string> labels;
    FeatureMatrix features;
};

inline FeatureTable read_features_csv(const fs::path& path)
{
    auto rows = parse_csv(read_file(path));
    if (rows.empty() || rows[0].empty() || rows[0][0] != "user") {
        throw Error(Errc::io, path.string() + ": expected a 'user,<labels>' header");
    }
    FeatureTable t;
    t.labels.assign(rows[0].begin() + 1, rows[0].end());
    const auto n = static_cast<Eigen::Index>(t.labels.size());
    t.features.X.resize(static_cast<Eigen::Index>(rows.size() - 1), n);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != n + 1) {
            throw Error(Errc::io, path.string() + ": row " + std::to_string(r + 1) + " has the wrong width");
        }
        t.features.user_ids.push_back(rows[r][0]);
        for (Eigen::Index j = 0; j < n; ++j) {
            t.features.X(static_cast<Eigen::Index>(r - 1), j) =
                parse_double(rows[r][static_cast<std::size_t>(j) + 1], path.string());
        }
    }
    return t;
}

inline void write_assignments_csv(const fs::path& path, const std::vector<std::string>& users,
                                  const std::vector<std::size_t>& clusters)
{
    auto out = open_output(path);
    out << "user,cluster\n";
    for (std::size_t i = 0; i < users.size(); ++i) out << csv_field(users[i]) << ',' << clusters[i] << '\n';
}

inline std::vector<std::pair<std::string, std::size_t>> read_assignments_csv(const fs::path& path)
{
    auto rows = parse_csv(read_file(path));
    if (rows.empty() || rows[0] != std::vector<std::string>{"user", "cluster"}) {
        throw Error(Errc::io, path.string() + ": expected a 'user,cluster' header");
    }
    std::vector<std::pair<std::string, std::size_t>> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 2) throw Error(Errc::io, path.string() + ": bad row " + std::to_string(r + 1));
        out.emplace_back(rows[r][0], parse_index(rows[r][1], path.string()));
    }
    return out;
}

/// Matrix with a leading id column; `columns` names the remaining ones.
inline void write_matrix_csv(const fs::path& path, std::string_view id_header, const std::vector<std::string>& ids,
                             const std::vector<std::string>& columns, const Matrix& M,
                             const std::vector<std::string>& extra_header = {},
                             const std::vector<std::vector<std::string>>& extra = {})
{
    auto out = open_output(path);
    out << id_header;
    for (const auto& c : columns) out << ',' << csv_field(c);
    for (const auto& c : extra_header) out << ',' << csv_field(c);
    out << '\n';
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        out << csv_field(ids[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < M.cols(); ++j) out << ',' << format_double(M(i, j));
        if (!extra.empty()) {
            for (const auto& e : extra[static_cast<std::size_t>(i)]) out << ',' << csv_field(e);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Traces (JSON lines): a header naming the vocabulary, then one user per line.

inline void write_traces(std::ostream& out, const std::vector<UserTrace>& traces, const ActionVocabulary& vocab)
{
    nlohmann::json header{{"type", "header"}, {"labels", nlohmann::json::array()}};
    for (const auto& l : vocab.labels()) header["labels"].push_back(l.name);
    out << header.dump() << '\n';
    for (const auto& t : traces) {
        nlohmann::json sessions = nlohmann::json::array();
        for (const auto& s : t.sessions) {
            sessions.push_back({s.start.time_since_epoch().count(), s.end.time_since_epoch().count(), s.size});
        }
        nlohmann::json resources = nlohmann::json::object();
        for (std::size_t i = 0; i < t.resources.size(); ++i) {
            if (!t.resources[i].empty()) resources[std::to_string(i)] = t.resources[i];
        }
        nlohmann::json rec{{"user", t.user}, {"sequence", t.sequence}, {"sessions", sessions}, {"resources", resources}};
        out << rec.dump() << '\n';
    }
}

inline void write_traces_file(const fs::path& path, const std::vector<UserTrace>& traces, const ActionVocabulary& vocab)
{
    auto out = open_output(path);
    write_traces(out, traces, vocab);
}

struct TraceFile {
    ActionVocabulary vocabulary;
    std::vector<UserTrace> traces;
};

inline TraceFile read_traces_file(const fs::path& path)
{
    LineBuffer buf;
    buf.data = read_file(path);
    split_lines(buf);
    if (buf.lines.empty()) {
        throw Error(Errc::empty_input, path.string() + " holds no traces header");
    }
    TraceFile tf;
    try {
        auto header = nlohmann::json::parse(buf.lines[0]);
        auto labels = header.at("labels").get<std::vector<std::string>>();
        tf.vocabulary = ActionVocabulary::from_names(labels);
        std::vector<std::string> got;
        for (const auto& l : tf.vocabulary.labels()) got.push_back(l.name);
        if (got != labels) {
            throw Error(Errc::vocabulary_mismatch, path.string() + ": label order differs from catalog order");
        }
        const auto n = tf.vocabulary.size();
        for (std::size_t i = 1; i < buf.lines.size(); ++i) {
            auto rec = nlohmann::json::parse(buf.lines[i]);
            UserTrace t;
            t.user = rec.at("user").get<std::string>();
            t.sequence = rec.at("sequence").get<std::vector<LabelId>>();
            for (auto id : t.sequence) {
                if (id >= n) throw Error(Errc::label_out_of_range, path.string() + ": label id out of range");
            }
            t.resources.assign(t.sequence.size(), std::string());
            for (const auto& [k, v] : rec.at("resources").items()) {
                const auto idx = parse_index(k, path.string());
                if (idx >= t.resources.size()) throw Error(Errc::io, path.string() + ": resource index out of range");
                t.resources[idx] = v.get<std::string>();
            }
            for (const auto& s : rec.at("sessions")) {
                t.sessions.push_back({Timestamp{std::chrono::seconds{s.at(0).get<std::int64_t>()}},
                                      Timestamp{std::chrono::seconds{s.at(1).get<std::int64_t>()}},
                                      s.at(2).get<std::size_t>()});
            }
            tf.traces.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::io, path.string() + ": " + e.what());
    }
    return tf;
}

}  // namespace clickmine

#endif  // CLICKMINE_IO_HPP
