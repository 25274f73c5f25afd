#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "spotdiff/errors.hpp"
#include "spotdiff/qsim.hpp"
#include "spotdiff/scene.hpp"

namespace spotdiff {

// Every knob of a dataset run. Serialized into the manifest so a run can be
// reproduced from its outputs.
struct RunConfig {
    int pairs = 100;
    std::uint64_t seed = 1;
    int workers = 1;
    double epsilon = 0.0;  // answerer noise for evaluation runs
    double split_train = 0.8;
    double split_valid = 0.1;
    double split_test = 0.1;
    SceneConfig scene;
    StrategyConfig strategy;

    // Serialized form; `workers` is an execution knob with no effect on the
    // produced data, so it stays out of the manifest and the hash.
    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["pairs"] = pairs;
        j["seed"] = seed;
        j["epsilon"] = epsilon;
        j["split"] = {split_train, split_valid, split_test};
        j["objects_min"] = scene.objects_min;
        j["objects_max"] = scene.objects_max;
        j["sample_points"] = scene.sample_points;
        j["min_separation"] = scene.min_separation;
        j["divergence_limit"] = scene.divergence_limit;
        j["floor_width"] = scene.floor_width;
        j["floor_depth"] = scene.floor_depth;
        j["retry_budget"] = scene.retry_budget;
        j["different_category_prob"] = scene.different_category_prob;
        j["strategy_n"] = strategy.n;
        j["strategy_m"] = strategy.m;
        j["max_rounds"] = strategy.max_rounds;
        return j;
    }

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig c;
        auto get = [&](const char* key, auto& out) {
            if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
        };
        get("pairs", c.pairs);
        get("seed", c.seed);
        get("workers", c.workers);
        get("epsilon", c.epsilon);
        if (j.contains("split")) {
            const auto& s = j.at("split");
            if (!s.is_array() || s.size() != 3)
                throw ConfigError("split", "must be an array of three ratios");
            c.split_train = s[0].get<double>();
            c.split_valid = s[1].get<double>();
            c.split_test = s[2].get<double>();
        }
        get("objects_min", c.scene.objects_min);
        get("objects_max", c.scene.objects_max);
        get("sample_points", c.scene.sample_points);
        get("min_separation", c.scene.min_separation);
        get("divergence_limit", c.scene.divergence_limit);
        get("floor_width", c.scene.floor_width);
        get("floor_depth", c.scene.floor_depth);
        get("retry_budget", c.scene.retry_budget);
        get("different_category_prob", c.scene.different_category_prob);
        get("strategy_n", c.strategy.n);
        get("strategy_m", c.strategy.m);
        get("max_rounds", c.strategy.max_rounds);
        c.validate();
        return c;
    }

    static RunConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config", "cannot open " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config", std::string("invalid JSON: ") + e.what());
        }
        return from_json(j);
    }

    void validate() const {
        if (pairs < 1) throw ConfigError("pairs", "must be >= 1");
        if (workers < 1) throw ConfigError("workers", "must be >= 1");
        if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("epsilon", "must be in [0, 1]");
        const double sum = split_train + split_valid + split_test;
        if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split", "ratios must sum to 1");
        if (split_train < 0 || split_valid < 0 || split_test < 0)
            throw ConfigError("split", "ratios must be non-negative");
        if (scene.objects_min < 1) throw ConfigError("objects_min", "must be >= 1");
        if (scene.objects_max < scene.objects_min)
            throw ConfigError("objects_max", "must be >= objects_min");
        if (scene.sample_points < 1) throw ConfigError("sample_points", "must be >= 1");
        if (scene.min_separation < 0) throw ConfigError("min_separation", "must be >= 0");
        if (scene.divergence_limit < 1) throw ConfigError("divergence_limit", "must be >= 1");
        if (scene.floor_width <= 0) throw ConfigError("floor_width", "must be > 0");
        if (scene.floor_depth <= 0) throw ConfigError("floor_depth", "must be > 0");
        if (scene.retry_budget < 1) throw ConfigError("retry_budget", "must be >= 1");
        if (scene.different_category_prob < 0 || scene.different_category_prob > 1)
            throw ConfigError("different_category_prob", "must be in [0, 1]");
        if (strategy.n < 1) throw ConfigError("strategy_n", "must be >= 1");
        if (strategy.m < 1) throw ConfigError("strategy_m", "must be >= 1");
        if (strategy.max_rounds < 1) throw ConfigError("max_rounds", "must be >= 1");
    }

    // FNV-1a over the canonical serialization; stable across platforms.
    std::string hash() const {
        const std::string s = to_json().dump();
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        char buf[19];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
};

}  // namespace spotdiff
