#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdlab/info.hpp"
#include "mdlab/lp.hpp"
#include "mdlab/sperner.hpp"

namespace mdlab::region {

using sperner::DecoderSet;
using sperner::SpernerFamily;

// Candidate rate-distortion operating point.
struct RdVector {
    std::map<int, double> rates;                // description (1-based) -> R_i
    std::map<DecoderSet, double> distortions;   // decoder -> D_N
};

// Reconstruction at one decoder: a table over the product of the listed PMF
// variables' alphabets (row-major, first input slowest).
struct ReconstructionMap {
    std::vector<std::string> inputs;
    std::vector<int> table;
};

struct DecoderSpec {
    DecoderSet decoder = 0;
    ReconstructionMap recon;
    info::DistortionFn distortion;
};

enum class Kind { EGC, ZB, SSC, Stage1, Stage2, Stage3, Stage4 };

// One structured-coding summation block: codebooks V_{A_1..A_m} over F_q with
// a shared-row lattice, whose F_q-linear combinations are decoded wherever
// A_{m+1} is decoded.
struct Summation {
    std::uint32_t q = 2;
    std::vector<SpernerFamily> families;  // A_1..A_m
    std::vector<std::string> v_vars;      // PMF variables for V_{A_k}
    SpernerFamily sum_family;             // A_{m+1}
};

struct RegionSpec {
    Kind kind = Kind::SSC;
    int l = 2;
    info::JointPmf pmf;
    std::string source_var = "X";
    std::map<SpernerFamily, std::string> aux;  // active families -> U variable
    std::vector<DecoderSpec> decoders;
    std::uint32_t q = 2;                  // field for Stage1+ (all auxiliaries on F_q)
    std::vector<Summation> summations;    // Stage2: one with m=2; Stage3: one; Stage4: many
    std::string ts_var;                   // EGC time-sharing variable Q ("" = absent)
    // explicit covering subsets (indices into the active-family list) required
    // once the active count exceeds the cap
    std::optional<std::vector<std::vector<int>>> covering_whitelist;
};

constexpr int kMaxActiveFamilies = 12;

// Linear inequality system over the auxiliary rate variables, with the R_i
// appearing as external parameters on the right-hand side.
struct BoundSystem {
    struct Row {
        std::vector<double> a;          // over vars
        lp::Rel rel = lp::Rel::Le;
        double b = 0;                   // constant
        std::map<int, double> rate_coeff;  // + sum_i coeff * R_i on the rhs
        std::string tag;
    };
    int l = 2;
    std::vector<std::string> vars;
    std::vector<Row> rows;
    std::map<DecoderSet, double> distortion_of;  // evaluated E d_N
};

BoundSystem ssc_bounds(const RegionSpec& spec);
BoundSystem nested_coset_bounds(const RegionSpec& spec);  // Stage 1
BoundSystem stage2_bounds(const RegionSpec& spec);
BoundSystem stage3_bounds(const RegionSpec& spec);
BoundSystem stage4_bounds(const RegionSpec& spec);
BoundSystem egc_bounds(const RegionSpec& spec);
BoundSystem zb_bounds(const RegionSpec& spec);
BoundSystem generate(const RegionSpec& spec);  // dispatch on spec.kind

struct Membership {
    bool feasible = false;
    std::string reason;                    // set when infeasible
    std::map<std::string, double> witness; // internal variable assignment
};

Membership check_membership(const BoundSystem& sys, const RdVector& v);

// Projection onto the (R_1..R_l) coordinates by Fourier-Motzkin elimination of
// every internal variable. Output inequalities are over R_1..R_l.
struct ProjectedRegion {
    std::vector<lp::Ineq> rate_rows;             // sum a_i R_i <= b
    std::map<DecoderSet, double> distortion_of;  // unchanged distortion floor
};

ProjectedRegion project_region(const BoundSystem& sys, std::size_t var_cap = 40);

// E d_N(g_N(inputs), X) under the spec's PMF.
double evaluate_distortion(const RegionSpec& spec, const DecoderSpec& dec);

}  // namespace mdlab::region
