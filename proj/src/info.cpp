#include "mdlab/info.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mdlab::info {

namespace {
constexpr std::size_t kMaxCells = std::size_t(1) << 24;

double xlog2x(double p) { return p > 0 ? p * std::log2(p) : 0.0; }
}  // namespace

JointPmf::JointPmf(std::vector<Variable> vars, std::vector<double> probs)
    : vars_(std::move(vars)), p_(std::move(probs)) {
    std::size_t total = 1;
    std::set<std::string> seen;
    for (const auto& v : vars_) {
        if (v.alphabet < 1) throw std::invalid_argument("alphabet must be positive");
        if (!seen.insert(v.name).second) throw std::invalid_argument("duplicate variable name " + v.name);
        if (total > kMaxCells / std::size_t(v.alphabet)) throw std::invalid_argument("PMF table too large");
        total *= std::size_t(v.alphabet);
    }
    if (p_.size() != total) throw std::invalid_argument("probability table has wrong size");
    double sum = 0;
    for (double x : p_) {
        if (x < 0) throw std::invalid_argument("negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12 * std::max<std::size_t>(1, p_.size()) && std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("probabilities sum to " + std::to_string(sum));
    strides_.assign(vars_.size(), 1);
    for (int i = int(vars_.size()) - 2; i >= 0; --i)
        strides_[i] = strides_[i + 1] * std::size_t(vars_[i + 1].alphabet);
}

int JointPmf::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return int(i);
    throw std::invalid_argument("unknown variable " + name);
}

std::optional<int> JointPmf::find(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return int(i);
    return std::nullopt;
}

int JointPmf::alphabet(const std::string& name) const { return vars_[index_of(name)].alphabet; }

double JointPmf::prob(const std::vector<int>& assignment) const {
    if (assignment.size() != vars_.size()) throw std::invalid_argument("assignment size mismatch");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (assignment[i] < 0 || assignment[i] >= vars_[i].alphabet)
            throw std::invalid_argument("assignment out of range");
        idx += strides_[i] * std::size_t(assignment[i]);
    }
    return p_[idx];
}

int JointPmf::symbol_at(std::size_t cell, int var_index) const {
    return int(cell / strides_[var_index] % std::size_t(vars_[var_index].alphabet));
}

void JointPmf::decode(std::size_t cell, std::vector<int>& out) const {
    out.resize(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i)
        out[i] = int(cell / strides_[i] % std::size_t(vars_[i].alphabet));
}

JointPmf JointPmf::marginal(const std::vector<std::string>& names) const {
    std::vector<int> keep;
    std::vector<Variable> vars;
    for (const auto& n : names) {
        keep.push_back(index_of(n));
        vars.push_back(vars_[keep.back()]);
    }
    std::size_t total = 1;
    for (const auto& v : vars) total *= std::size_t(v.alphabet);
    std::vector<std::size_t> ostr(vars.size(), 1);
    for (int i = int(vars.size()) - 2; i >= 0; --i) ostr[i] = ostr[i + 1] * std::size_t(vars[i + 1].alphabet);
    std::vector<double> out(total, 0.0);
    for (std::size_t cell = 0; cell < p_.size(); ++cell) {
        if (p_[cell] == 0) continue;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < keep.size(); ++i) idx += ostr[i] * std::size_t(symbol_at(cell, keep[i]));
        out[idx] += p_[cell];
    }
    return JointPmf(std::move(vars), std::move(out));
}

JointPmf JointPmf::with_function_variable(const std::string& name, int alphabet,
                                          const std::function<int(const std::vector<int>&)>& f) const {
    std::vector<Variable> vars = vars_;
    vars.push_back({name, alphabet});
    std::vector<double> out(p_.size() * std::size_t(alphabet), 0.0);
    std::vector<int> asg;
    for (std::size_t cell = 0; cell < p_.size(); ++cell) {
        decode(cell, asg);
        const int v = f(asg);
        if (v < 0 || v >= alphabet) throw std::invalid_argument("function value out of range");
        out[cell * std::size_t(alphabet) + std::size_t(v)] = p_[cell];
    }
    return JointPmf(std::move(vars), std::move(out));
}

double JointPmf::entropy(const std::vector<std::string>& names) const {
    if (names.empty()) return 0.0;
    JointPmf m = marginal(names);
    double h = 0;
    for (double x : m.p_) h -= xlog2x(x);
    return h;
}

double JointPmf::conditional_entropy(const std::vector<std::string>& names,
                                     const std::vector<std::string>& given) const {
    if (names.empty()) return 0.0;
    if (given.empty()) return entropy(names);
    std::vector<std::string> all = names;
    for (const auto& g : given)
        if (std::find(all.begin(), all.end(), g) == all.end()) all.push_back(g);
    return entropy(all) - entropy(given);
}

double JointPmf::mutual_information(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                    const std::vector<std::string>& given) const {
    return conditional_entropy(a, given) - [&] {
        std::vector<std::string> g = given;
        for (const auto& x : b)
            if (std::find(g.begin(), g.end(), x) == g.end()) g.push_back(x);
        return conditional_entropy(a, g);
    }();
}

double JointPmf::expectation(const std::function<double(const std::vector<int>&)>& f) const {
    double e = 0;
    std::vector<int> asg;
    for (std::size_t cell = 0; cell < p_.size(); ++cell) {
        if (p_[cell] == 0) continue;
        decode(cell, asg);
        e += p_[cell] * f(asg);
    }
    return e;
}

double binary_entropy(double p) {
    if (p < 0 || p > 1) throw std::invalid_argument("binary_entropy argument out of [0,1]");
    return -xlog2x(p) - xlog2x(1 - p);
}

double binary_convolve(double a, double b) {
    if (a < 0 || a > 1 || b < 0 || b > 1) throw std::invalid_argument("binary_convolve argument out of [0,1]");
    return a * (1 - b) + b * (1 - a);
}

double entropy_of(const std::vector<double>& dist) {
    double h = 0;
    for (double x : dist) h -= xlog2x(x);
    return h;
}

TypicalityWindows typicality_windows(const JointPmf& p, std::size_t n, double eps) {
    TypicalityWindows w;
    const auto& probs = p.probs();
    w.lo.resize(probs.size());
    w.hi.resize(probs.size());
    for (std::size_t c = 0; c < probs.size(); ++c) {
        if (probs[c] == 0) {
            w.lo[c] = 0;
            w.hi[c] = 0;
            continue;
        }
        const double np = double(n) * probs[c];
        w.lo[c] = long(std::ceil(np * (1 - eps) - 1e-9));
        w.hi[c] = long(std::floor(np * (1 + eps) + 1e-9));
        if (w.lo[c] < 0) w.lo[c] = 0;
    }
    return w;
}

bool is_jointly_typical(const std::vector<std::vector<int>>& seqs, const JointPmf& p, double eps) {
    const auto& vars = p.variables();
    if (seqs.size() != vars.size()) throw std::invalid_argument("sequence count mismatch");
    if (seqs.empty()) return true;
    const std::size_t n = seqs[0].size();
    for (const auto& s : seqs)
        if (s.size() != n) throw std::invalid_argument("sequence length mismatch");
    std::vector<std::size_t> strides(vars.size(), 1);
    for (int i = int(vars.size()) - 2; i >= 0; --i)
        strides[i] = strides[i + 1] * std::size_t(vars[i + 1].alphabet);
    std::vector<long> counts(p.cells(), 0);
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t idx = 0;
        for (std::size_t v = 0; v < vars.size(); ++v) {
            const int s = seqs[v][t];
            if (s < 0 || s >= vars[v].alphabet) throw std::invalid_argument("symbol out of alphabet");
            idx += strides[v] * std::size_t(s);
        }
        ++counts[idx];
    }
    const auto w = typicality_windows(p, n, eps);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (p.probs()[c] == 0) {
            if (counts[c] != 0) return false;
        } else if (counts[c] < w.lo[c] || counts[c] > w.hi[c]) {
            return false;
        }
    }
    return true;
}

JointPmf table1_pmf(double d0) {
    if (!(d0 > 0 && d0 < 0.5)) throw std::invalid_argument("table1_pmf requires 0 < D0 < 1/2");
    const double s2 = std::sqrt(2.0);
    // cells ordered (x, v1, v2)
    std::vector<double> p(8);
    auto cell = [&](int x, int v1, int v2) -> double& { return p[std::size_t(x * 4 + v1 * 2 + v2)]; };
    cell(0, 0, 0) = (1 - d0) / 2;
    cell(0, 0, 1) = (s2 - 1) * d0 / 2;
    cell(0, 1, 0) = (s2 - 1) * d0 / 2;
    cell(0, 1, 1) = (3 - 2 * s2) * d0 / 2;
    cell(1, 0, 0) = d0 / 2;
    cell(1, 0, 1) = (s2 - 1) * (1 - d0) / 2;
    cell(1, 1, 0) = (s2 - 1) * (1 - d0) / 2;
    cell(1, 1, 1) = (3 - 2 * s2) * (1 - d0) / 2;
    return JointPmf({{"X", 2}, {"V1", 2}, {"V2", 2}}, std::move(p));
}

double DistortionFn::max_value() const {
    double m = 0;
    for (const auto& row : d)
        for (double x : row) m = std::max(m, x);
    return m;
}

DistortionFn hamming_distortion(int alphabet) {
    DistortionFn f;
    f.d.assign(std::size_t(alphabet), std::vector<double>(std::size_t(alphabet), 1.0));
    for (int i = 0; i < alphabet; ++i) f.d[std::size_t(i)][std::size_t(i)] = 0.0;
    return f;
}

DistortionFn alpha_beta_distortion(double alpha, double beta) {
    if (alpha <= 0 || beta <= 0) throw std::invalid_argument("alpha, beta must be positive");
    DistortionFn f;
    f.d = {{0.0, alpha}, {beta, 0.0}};
    return f;
}

BaResult blahut_arimoto_slope(const std::vector<double>& source, const DistortionFn& d, double slope,
                              double tol, int max_iter) {
    const std::size_t nx = source.size();
    const std::size_t ny = std::size_t(d.recon_alphabet());
    if (d.d.size() != nx) throw std::invalid_argument("distortion/source size mismatch");
    if (slope < 0) throw std::invalid_argument("slope must be nonnegative");
    // exp weights: 2^{-slope * d}
    std::vector<std::vector<double>> w(nx, std::vector<double>(ny));
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) w[x][y] = std::exp2(-slope * d.d[x][y]);

    std::vector<double> q(ny, 1.0 / double(ny));
    std::vector<std::vector<double>> ch(nx, std::vector<double>(ny, 0.0));
    double prev_obj = 1e300;
    int it = 0;
    for (; it < max_iter; ++it) {
        // channel update
        for (std::size_t x = 0; x < nx; ++x) {
            double z = 0;
            for (std::size_t y = 0; y < ny; ++y) z += q[y] * w[x][y];
            for (std::size_t y = 0; y < ny; ++y) ch[x][y] = q[y] * w[x][y] / z;
        }
        // output update
        std::vector<double> nq(ny, 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) nq[y] += source[x] * ch[x][y];
        q = nq;
        // Lagrangian objective R + slope*D
        double rate = 0, dist = 0;
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) {
                if (ch[x][y] <= 0 || source[x] <= 0) continue;
                rate += source[x] * ch[x][y] * std::log2(ch[x][y] / q[y]);
                dist += source[x] * ch[x][y] * d.d[x][y];
            }
        const double obj = rate + slope * dist;
        if (std::abs(prev_obj - obj) < tol) {
            ++it;
            break;
        }
        prev_obj = obj;
    }
    if (it >= max_iter) throw std::runtime_error("blahut_arimoto did not converge (ill-conditioned slope)");
    BaResult res;
    res.channel = ch;
    res.slope = slope;
    res.iterations = it;
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) {
            if (ch[x][y] <= 0 || source[x] <= 0) continue;
            res.rate += source[x] * ch[x][y] * std::log2(ch[x][y] / q[y]);
            res.distortion += source[x] * ch[x][y] * d.d[x][y];
        }
    if (res.rate < 0) res.rate = 0;
    return res;
}

BaResult blahut_arimoto_target_distortion(const std::vector<double>& source, const DistortionFn& d,
                                          double target_d, double tol) {
    double lo = 0.0, hi = 1.0;
    // grow hi until distortion <= target (large slope -> small distortion)
    BaResult best = blahut_arimoto_slope(source, d, hi);
    int guard = 0;
    while (best.distortion > target_d && guard++ < 60) {
        hi *= 2;
        best = blahut_arimoto_slope(source, d, hi);
    }
    if (best.distortion > target_d) throw std::invalid_argument("target distortion unattainable");
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2;
        BaResult r = blahut_arimoto_slope(source, d, mid);
        if (r.distortion <= target_d) {
            hi = mid;
            best = r;
        } else {
            lo = mid;
        }
        if (hi - lo < tol * std::max(1.0, hi)) break;
    }
    return best;
}

BaResult blahut_arimoto_target_rate(const std::vector<double>& source, const DistortionFn& d,
                                    double target_r, double tol) {
    double lo = 0.0, hi = 1.0;
    BaResult r_hi = blahut_arimoto_slope(source, d, hi);
    int guard = 0;
    while (r_hi.rate < target_r && guard++ < 60) {
        hi *= 2;
        r_hi = blahut_arimoto_slope(source, d, hi);
    }
    BaResult best = r_hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2;
        BaResult r = blahut_arimoto_slope(source, d, mid);
        if (r.rate >= target_r) {
            hi = mid;
            best = r;
        } else {
            lo = mid;
        }
        if (hi - lo < tol * std::max(1.0, hi)) break;
    }
    return best;
}

}  // namespace mdlab::info
