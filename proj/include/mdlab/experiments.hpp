#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdlab/codes.hpp"
#include "mdlab/info.hpp"
#include "mdlab/region.hpp"

namespace mdlab::experiments {

struct ExperimentConfig {
    std::size_t n = 256;
    int trials = 100;
    std::uint64_t seed = 1;
    double eps = 0.3;        // typicality level
    double rate_pad = 0.05;  // finite-n rate padding epsilon_n
    int best_of = 32;        // code-search width T
    int workers = 0;         // 0 = hardware concurrency
    // finite-n machinery knobs
    std::size_t trellis_states = std::size_t(1) << 14;
    int search_retries = 60;
    double pack_pad = 0.05;  // extra bin-rate margin so unique decoding concentrates
};

struct ExperimentReport {
    std::string name;
    ExperimentConfig config;
    std::map<std::string, double> rates;        // per-description empirical rates (bits/symbol)
    std::map<std::string, double> distortions;  // per-decoder averages
    std::map<std::string, double> stats;        // success frequencies, error rates, CI half-widths
    std::vector<std::string> trial_columns;
    std::vector<std::vector<double>> trial_rows;
};

// ---- calibrated typicality search over a coset code ----
//
// Per-position targets P(symbol | context); contexts are caller-defined ids.
// The searcher runs Viterbi over Gibbs costs -log2 P with per-context
// calibration offsets (fitted on pilot data) plus per-retry jitter, and
// returns the first proposal the acceptance functor passes.
struct ConditionalTarget {
    std::uint32_t q = 2;
    int n_ctx = 1;
    std::vector<double> p;  // n_ctx * q, rows summing to 1
};

class TypicalSearcher {
public:
    TypicalSearcher(codes::CosetCode code, ConditionalTarget target, std::size_t state_cap);

    // fit the calibration offsets against pilot context streams
    void calibrate(const std::function<std::vector<int>(int)>& pilot_ctx, int pilots, int iterations,
                   std::uint64_t seed);

    std::optional<gf::FieldVector> search(const std::vector<int>& ctx,
                                          const std::function<bool(const gf::FieldVector&)>& accept,
                                          std::uint64_t seed, int retries, double jitter = 0.4) const;

    const codes::CosetCode& code() const { return code_; }
    const std::vector<double>& offsets() const { return theta_; }

private:
    gf::FieldVector propose(const std::vector<int>& ctx, std::uint64_t jitter_seed, double jitter) const;
    codes::CosetCode code_;
    ConditionalTarget target_;
    std::size_t state_cap_;
    std::vector<double> theta_;  // n_ctx * q calibration offsets (bits)
};

// ---- covering / packing Monte Carlo (Lemmas of Section V) ----

struct CoveringRates {
    double ro = 0, rop = 0, ri = 0;
};

// P(XUV) must carry variables named X, U, V with U, V on F_q.
ExperimentReport covering_mc(const codes::SharedInnerPair& pair, const info::JointPmf& pxuv,
                             const ExperimentConfig& cfg);

ExperimentReport packing_mc(const codes::SharedInnerPair& pair, double rho1, double rho2,
                            const info::JointPmf& pxuv, const ExperimentConfig& cfg);

// default test distribution: X BSS, U = X + Be(flip), V = X + Be(flip) indep.
info::JointPmf covering_test_pmf(double flip);

// shared-inner pair at rates (bits/symbol) with banded generators
codes::SharedInnerPair build_covering_pair(std::uint32_t q, std::size_t n, const CoveringRates& rates,
                                           std::size_t trellis_states, std::uint64_t seed);

// analytic redundancy check of the dropped packing bound: rate tuples
// satisfying (newe)-(neweq) and (sumpack) also satisfy the extra inequality.
struct RedundancyCheck {
    int sampled = 0;
    int implied = 0;  // should equal sampled
};
RedundancyCheck packing_redundancy_check(int samples, std::uint64_t seed);

// ---- the paper's worked examples ----

ExperimentReport run_vecsource(double delta, const ExperimentConfig& cfg);
ExperimentReport run_vecbin(double p, const ExperimentConfig& cfg);
ExperimentReport run_scalar(double d0, const ExperimentConfig& cfg);

// scalar-example closed forms
double scalar_alpha(double d0);
double scalar_beta(double d0);
double scalar_r3_bound(double d0);
double scalar_d3_bound(double d0);
double scalar_side_distortion(double d0);  // (1 - (1-2 D0)(2 - sqrt 2)) / 2
// sign-corrected covering constraint of the scalar example; the printed
// inequality holds when this is >= 1, with equality exactly when the
// sum-codebook covering bound is tight
double scalar_nonred_constraint(double d0);

// ---- appendix computer-assisted sweep ----

struct FigdOptions {
    double grid_step = 0.01;
    bool refine = true;
    int workers = 0;
};

struct FigdResult {
    double max_value = 0;
    double a0 = 0, a1 = 0, b0 = 0, b1 = 0;  // argmax
    double bound = 0;                       // 2 (1 - h_b(D0))
    std::size_t evaluated = 0;              // feasible grid points
    std::size_t grid_points = 0;            // total grid points
    // plot data: for each (a0, a1) cell the maximum over the (b0, b1) grid
    std::vector<std::array<double, 3>> slice;
};

FigdResult figd_sweep(double d0, const FigdOptions& opt);

// ---- ZB witness search ----

struct ZbWitness {
    info::JointPmf pmf;
    region::RdVector target;
    double zb_slack = 1e9;   // smallest s with (R+s, D+s) ZB-feasible
    double egc_slack = 1e9;  // same under the EGC system
};

ZbWitness zb_witness_search(const ExperimentConfig& cfg);

}  // namespace mdlab::experiments
