#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "locind/discovery.hpp"
#include "locind/litest.hpp"
#include "locind/stats.hpp"

namespace locind {

struct LevelPowerConfig {
    std::vector<std::string> structures{"L1", "L2", "L3", "P1", "P2", "P3"};
    std::size_t repetitions = 200;
    double horizon = 2000.0;
    double burn_in = 50.0;
    std::uint64_t seed = 7;
    std::vector<int> orders{1, 2};
    LITestConfig test;
    int threads = 1;
    // A run fails when more than this fraction of tests fail.
    double max_failure_rate = 0.02;
};

struct LevelPowerRecord {
    std::string structure;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    int order = 0;
    double p_value = 1.0;
    bool reject = false;
    bool failed = false;
    std::string note;
};

struct LevelPowerRow {
    std::string structure;
    int order = 0;
    bool null_holds = true;
    Proportion rejections;
    std::size_t failures = 0;
};

struct LevelPowerResult {
    std::vector<LevelPowerRow> rows;
    // Ordered by structure, repetition, order.
    std::vector<LevelPowerRecord> records;
    double failure_rate = 0.0;
    bool ok = true;

    const LevelPowerRow& row(const std::string& structure, int order) const;
};

// Simulate each structure, drop the latent mark and test j -/-> k | {c}
// (empty for two-node structures) at every order on the same realization.
LevelPowerResult run_level_power(const LevelPowerConfig& config);

std::string level_power_csv(const LevelPowerResult& result);
std::string level_power_records_csv(const LevelPowerResult& result);

struct ShdConfig {
    std::vector<int> dims{3, 4, 5, 6, 7};
    std::size_t repetitions = 20;
    double horizon = 2000.0;
    double burn_in = 50.0;
    std::uint64_t seed = 7;
    double edge_prob = 0.2;
    std::vector<int> orders{1, 2};
    LITestConfig test;
    double alpha = 0.05;
    int threads = 1;
    double max_failure_rate = 0.02;
};

struct ShdRecord {
    int dim = 0;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    int order = 0;
    int true_edges = 0;
    int learned_edges = 0;
    int shd = 0;
    std::size_t tests = 0;
    std::size_t failed_tests = 0;
    bool failed = false;
    std::string note;
};

struct ShdSummary {
    int dim = 0;
    int order = 0;
    std::size_t n = 0;
    double mean = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
};

struct ShdResult {
    std::vector<ShdSummary> summary;
    // Ordered by dimension, repetition, order.
    std::vector<ShdRecord> records;
    double failure_rate = 0.0;
    bool ok = true;

    const ShdSummary& at(int dim, int order) const;
};

// Sample a random graph per repetition, simulate it and learn the graph at
// every order on the same realization.
ShdResult run_shd_experiment(const ShdConfig& config);

std::string shd_summary_csv(const ShdResult& result);
std::string shd_records_csv(const ShdResult& result);

struct CalibrationConfig {
    std::size_t null_repetitions = 500;
    std::size_t rescaling_repetitions = 100;
    std::size_t count_repetitions = 200;
    std::size_t gradient_points = 20;
    double null_horizon = 2000.0;
    double rescaling_horizon = 2000.0;
    double count_horizon = 4000.0;
    std::uint64_t seed = 7;
    std::vector<int> orders{1, 2};
    LITestConfig test;
    int threads = 1;
};

struct CalibrationCheck {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

struct CalibrationReport {
    std::vector<CalibrationCheck> checks;

    bool all_pass() const;
};

// Null p-values of independent Poisson pairs (KS distance < 0.08 per order).
CalibrationCheck null_pvalue_check(const CalibrationConfig& config, int order);
// Pooled compensator gaps of a self-exciting process (KS p-value > 0.01).
CalibrationCheck time_rescaling_check(const CalibrationConfig& config);
// Homogeneous Poisson counts (rate 0.25, identity link) within 4 sd in at
// least 99% of seeds.
CalibrationCheck poisson_count_check(const CalibrationConfig& config);
// Central differences against analytic gradient and Hessian (max relative
// error < 1e-5) for every link.
CalibrationCheck gradient_check(const CalibrationConfig& config);

CalibrationReport run_calibration_suite(const CalibrationConfig& config);

} // namespace locind
