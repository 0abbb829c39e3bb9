#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mdlab::info {

struct Variable {
    std::string name;
    int alphabet = 2;
};

// Dense joint PMF over named finite variables. Immutable after construction.
// Total table size is capped at 2^24 cells.
class JointPmf {
public:
    JointPmf() = default;
    JointPmf(std::vector<Variable> vars, std::vector<double> probs);

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<double>& probs() const { return p_; }
    std::size_t cells() const { return p_.size(); }
    int index_of(const std::string& name) const;             // throws if unknown
    std::optional<int> find(const std::string& name) const;  // nullopt if unknown
    int alphabet(const std::string& name) const;

    double prob(const std::vector<int>& assignment) const;

    // Symbol of variable v in the flat cell index.
    int symbol_at(std::size_t cell, int var_index) const;

    JointPmf marginal(const std::vector<std::string>& names) const;

    // Adds a variable defined as a deterministic function of existing ones.
    JointPmf with_function_variable(const std::string& name, int alphabet,
                                    const std::function<int(const std::vector<int>&)>& f) const;

    // H(vars) and H(vars | given), in bits.
    double entropy(const std::vector<std::string>& names) const;
    double conditional_entropy(const std::vector<std::string>& names,
                               const std::vector<std::string>& given) const;
    double mutual_information(const std::vector<std::string>& a, const std::vector<std::string>& b,
                              const std::vector<std::string>& given = {}) const;

    // E f(assignment)
    double expectation(const std::function<double(const std::vector<int>&)>& f) const;

private:
    std::vector<Variable> vars_;
    std::vector<double> p_;
    std::vector<std::size_t> strides_;
    void decode(std::size_t cell, std::vector<int>& out) const;
};

double binary_entropy(double p);
double binary_convolve(double a, double b);
double entropy_of(const std::vector<double>& dist);

// Robust (Csiszar-style) frequency typicality: for every joint symbol a,
// |freq(a)/n - p(a)| <= eps * p(a), and freq(a)=0 wherever p(a)=0.
// `seqs` holds one sequence per variable of the PMF, in variable order.
bool is_jointly_typical(const std::vector<std::vector<int>>& seqs, const JointPmf& p, double eps);

// Integer count windows for the same convention: cell -> [lo, hi] on counts.
struct TypicalityWindows {
    std::vector<long> lo, hi;  // indexed by flat cell
};
TypicalityWindows typicality_windows(const JointPmf& p, std::size_t n, double eps);

// Joint distribution of Table 1 on (X, V1, V2), alphabetic order X, V1, V2.
JointPmf table1_pmf(double d0);

struct DistortionFn {
    // d[x][xhat] >= 0, bounded
    std::vector<std::vector<double>> d;
    double at(int x, int xhat) const { return d[x][xhat]; }
    int source_alphabet() const { return int(d.size()); }
    int recon_alphabet() const { return d.empty() ? 0 : int(d[0].size()); }
    double max_value() const;
};

DistortionFn hamming_distortion(int alphabet);
// Example 6 distortion: 0 on diagonal, alpha for (x=0 -> 1), beta for (x=1 -> 0).
DistortionFn alpha_beta_distortion(double alpha, double beta);

struct BaResult {
    std::vector<std::vector<double>> channel;  // P(xhat | x)
    double rate = 0;                           // bits per symbol
    double distortion = 0;
    double slope = 0;  // Lagrange multiplier (bits per unit distortion)
    int iterations = 0;
};

// Blahut-Arimoto at a fixed Lagrange slope s (cost R + s*D, s in bits/distortion).
BaResult blahut_arimoto_slope(const std::vector<double>& source, const DistortionFn& d, double slope,
                              double tol = 1e-11, int max_iter = 100000);

// Bisection on the slope to hit a target distortion (returns the tightest
// channel with distortion <= target when the target is attainable).
BaResult blahut_arimoto_target_distortion(const std::vector<double>& source, const DistortionFn& d,
                                          double target_d, double tol = 1e-9);

// Bisection on the slope to hit a target rate.
BaResult blahut_arimoto_target_rate(const std::vector<double>& source, const DistortionFn& d,
                                    double target_r, double tol = 1e-9);

}  // namespace mdlab::info
