#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "qwalk/coin.hpp"
#include "qwalk/stats.hpp"

namespace qwalk {

std::string_view version();

struct RunMetadata {
    std::string method;  // unitary | trajectory | density | moments | compare
    std::optional<ChannelModel> channel;
    ChannelStrength strength;
    CoinState coin;
    int steps = 0;
    std::uint64_t runs = 0;
    std::optional<std::uint64_t> seed;
    nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json to_json(const RunMetadata& meta);
nlohmann::json to_json(const PositionDistribution& dist);
nlohmann::json to_json(const MomentSeries& series);
PositionDistribution distribution_from_json(const nlohmann::json& j);

// CSV header `x,probability`, one row per lattice site of the stored range,
// numbers printed with 17 significant digits.
void write_distribution_csv(const std::filesystem::path& path, const PositionDistribution& dist);
PositionDistribution read_distribution_csv(const std::filesystem::path& path);

// `t,mean,variance` plus `,stderr_mean,stderr_variance` when the series
// carries standard errors.
void write_moments_csv(const std::filesystem::path& path, const MomentSeries& series);
MomentSeries read_moments_csv(const std::filesystem::path& path);

// {meta: ..., data: ...}
void write_json(const std::filesystem::path& path, const RunMetadata& meta, const nlohmann::json& data);
nlohmann::json read_json(const std::filesystem::path& path);

// Writes `text` verbatim; throws IoError naming the path on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

std::string format_double(double v);

}  // namespace qwalk
