#include "qwalk/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "qwalk/errors.hpp"

#ifndef QWALK_VERSION
#define QWALK_VERSION "0.0.0"
#endif

namespace qwalk {

std::string_view version() { return QWALK_VERSION; }

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading: " + std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::filesystem::path& path, std::string& header) {
    std::istringstream in(read_all(path));
    std::vector<std::vector<std::string>> rows;
    if (!std::getline(in, header)) throw IoError("'" + path.string() + "' is empty");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw IoError("'" + path.string() + "': malformed number '" + s + "'");
    return v;
}

nlohmann::json nullable(const std::optional<double>& v) {
    if (!v || std::isnan(*v)) return nullptr;
    return *v;
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

nlohmann::json to_json(const RunMetadata& meta) {
    nlohmann::json j;
    j["method"] = meta.method;
    j["channel"] = meta.channel ? nlohmann::json(std::string(to_string(*meta.channel))) : nlohmann::json(nullptr);
    j["p"] = meta.strength.p;
    j["theta"] = meta.strength.theta;
    j["q"] = meta.strength.q;
    j["coin"] = {meta.coin.alpha.real(), meta.coin.alpha.imag(), meta.coin.beta.real(), meta.coin.beta.imag()};
    j["steps"] = meta.steps;
    j["runs"] = meta.runs;
    j["seed"] = meta.seed ? nlohmann::json(*meta.seed) : nlohmann::json(nullptr);
    j["version"] = std::string(version());
    for (const auto& [key, value] : meta.extra.items()) j[key] = value;
    return j;
}

nlohmann::json to_json(const PositionDistribution& dist) {
    return {{"offset", dist.offset}, {"probabilities", dist.probabilities}};
}

nlohmann::json to_json(const MomentSeries& series) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : series) {
        nlohmann::json row{{"t", e.t}, {"mean", e.mean}, {"variance", e.variance}};
        if (e.stderr_mean) row["stderr_mean"] = nullable(e.stderr_mean);
        if (e.stderr_variance) row["stderr_variance"] = nullable(e.stderr_variance);
        arr.push_back(std::move(row));
    }
    return arr;
}

PositionDistribution distribution_from_json(const nlohmann::json& j) {
    return {j.at("offset").get<int>(), j.at("probabilities").get<std::vector<double>>()};
}

void write_distribution_csv(const std::filesystem::path& path, const PositionDistribution& dist) {
    std::string text = "x,probability\n";
    for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
        text += std::to_string(dist.offset + static_cast<int>(i));
        text += ',';
        text += format_double(dist.probabilities[i]);
        text += '\n';
    }
    write_text(path, text);
}

PositionDistribution read_distribution_csv(const std::filesystem::path& path) {
    std::string header;
    const auto rows = parse_csv(path, header);
    if (header != "x,probability") throw IoError("'" + path.string() + "': unexpected header '" + header + "'");
    PositionDistribution d;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 2) throw IoError("'" + path.string() + "': expected 2 columns");
        const int x = std::stoi(rows[i][0]);
        if (i == 0) d.offset = x;
        if (x != d.offset + static_cast<int>(i)) throw IoError("'" + path.string() + "': positions not consecutive");
        d.probabilities.push_back(parse_double(rows[i][1], path));
    }
    return d;
}

void write_moments_csv(const std::filesystem::path& path, const MomentSeries& series) {
    bool with_errors = false;
    for (const auto& e : series) with_errors = with_errors || e.stderr_mean || e.stderr_variance;
    std::string text = with_errors ? "t,mean,variance,stderr_mean,stderr_variance\n" : "t,mean,variance\n";
    for (const auto& e : series) {
        text += std::to_string(e.t) + ',' + format_double(e.mean) + ',' + format_double(e.variance);
        if (with_errors) {
            text += ',' + format_double(e.stderr_mean.value_or(NAN));
            text += ',' + format_double(e.stderr_variance.value_or(NAN));
        }
        text += '\n';
    }
    write_text(path, text);
}

MomentSeries read_moments_csv(const std::filesystem::path& path) {
    std::string header;
    const auto rows = parse_csv(path, header);
    const bool with_errors = header == "t,mean,variance,stderr_mean,stderr_variance";
    if (!with_errors && header != "t,mean,variance") {
        throw IoError("'" + path.string() + "': unexpected header '" + header + "'");
    }
    MomentSeries series;
    for (const auto& row : rows) {
        if (row.size() != (with_errors ? 5u : 3u)) throw IoError("'" + path.string() + "': wrong column count");
        MomentEntry e;
        e.t = std::stoi(row[0]);
        e.mean = parse_double(row[1], path);
        e.variance = parse_double(row[2], path);
        if (with_errors) {
            e.stderr_mean = parse_double(row[3], path);
            e.stderr_variance = parse_double(row[4], path);
        }
        series.push_back(e);
    }
    return series;
}

void write_json(const std::filesystem::path& path, const RunMetadata& meta, const nlohmann::json& data) {
    const nlohmann::json doc{{"meta", to_json(meta)}, {"data", data}};
    write_text(path, doc.dump(2) + "\n");
}

nlohmann::json read_json(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(read_all(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    }
}

}  // namespace qwalk
