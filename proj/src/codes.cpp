#include "mdlab/codes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdlab::codes {

CosetCode::CosetCode(gf::FieldMatrix generator, gf::FieldVector dither, std::uint64_t seed)
    : gen_(std::move(generator)), dither_(std::move(dither)), seed_(seed) {
    if (gen_.rows() > gen_.cols()) throw std::invalid_argument("coset code requires k <= n");
    if (dither_.size() != gen_.cols() || dither_.modulus() != gen_.modulus())
        throw std::invalid_argument("dither shape/modulus mismatch");
}

double CosetCode::rate_bits() const {
    return n() == 0 ? 0.0 : double(k()) / double(n()) * std::log2(double(q()));
}

bool CosetCode::enumerable() const { return double(k()) * std::log2(double(q())) <= kEnumerableBits; }

gf::FieldVector CosetCode::encode(const gf::FieldVector& message) const {
    return gf::vec_add(gf::mat_vec_mul(gen_, message), dither_);
}

const trellis::Trellis& CosetCode::trellis(std::size_t state_cap) const {
    if (!trellis_) trellis_ = std::make_shared<trellis::Trellis>(trellis::build_trellis(gen_, state_cap));
    return *trellis_;
}

CosetCode build_coset_code(std::uint32_t q, std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k > n) throw std::invalid_argument("build_coset_code requires k <= n");
    return CosetCode(gf::random_matrix(k, n, q, splitmix64(seed)),
                     gf::random_vector(n, q, splitmix64(seed ^ 0xd1fe1ded)), seed);
}

namespace {
void fill_banded_row(gf::FieldMatrix& g, std::size_t row, std::size_t start, std::size_t window, Rng& rng);
std::size_t banded_start(std::size_t t, std::size_t total_rows, std::size_t n, std::size_t window);
}  // namespace

CosetCode build_banded_code(std::uint32_t q, std::size_t n, std::size_t k, std::size_t window,
                            std::uint64_t seed) {
    if (k > n) throw std::invalid_argument("build_banded_code requires k <= n");
    if (window < 1) throw std::invalid_argument("window must be positive");
    Rng rng(splitmix64(seed));
    gf::FieldMatrix g(k, n, q);
    for (std::size_t r = 0; r < k; ++r) fill_banded_row(g, r, banded_start(r, k, n, window), window, rng);
    return CosetCode(std::move(g), gf::random_vector(n, q, splitmix64(seed ^ 0xd1fe1ded)), seed);
}

CosetCode linear_code(gf::FieldMatrix generator) {
    gf::FieldVector zero(generator.cols(), generator.modulus());
    return CosetCode(std::move(generator), std::move(zero), 0);
}

std::vector<gf::FieldVector> enumerate_codebook(const CosetCode& code) {
    if (!code.enumerable()) throw std::invalid_argument("codebook too large to enumerate");
    const std::uint32_t q = code.q();
    const std::size_t k = code.k(), n = code.n();
    std::size_t count = 1;
    for (std::size_t i = 0; i < k; ++i) count *= q;
    std::vector<gf::FieldVector> out;
    out.reserve(count);
    // lexicographic message order: digit 0 most significant
    gf::FieldVector msg(k, q);
    std::vector<std::uint8_t> cur(n, 0);
    for (std::size_t i = 0; i < n; ++i) cur[i] = code.dither()[i];
    std::vector<std::uint32_t> digits(k, 0);
    for (std::size_t idx = 0;; ++idx) {
        out.emplace_back(cur, q);
        if (idx + 1 == count) break;
        // increment from the least-significant end (digit k-1)
        for (std::size_t d = k; d-- > 0;) {
            const auto row = code.generator().row(d);
            // adding one to digit d adds row d once; rolling over q-1 -> 0
            // subtracts (q-1) rows, i.e. adds one row as well (q*row = 0)
            for (std::size_t c = 0; c < n; ++c) cur[c] = std::uint8_t((cur[c] + row[c]) % q);
            digits[d] = (digits[d] + 1) % q;
            if (digits[d] != 0) break;
        }
    }
    return out;
}

namespace {

gf::FieldVector message_from_index(std::size_t idx, std::size_t k, std::uint32_t q) {
    gf::FieldVector msg(k, q);
    for (std::size_t d = k; d-- > 0;) {
        msg.set(d, std::uint32_t(idx % q));
        idx /= q;
    }
    return msg;
}

QuantizationResult exhaustive_min_hamming(const CosetCode& code, const gf::FieldVector& x) {
    auto cws = enumerate_codebook(code);
    std::size_t best = 0, best_d = SIZE_MAX;
    for (std::size_t i = 0; i < cws.size(); ++i) {
        const std::size_t d = gf::hamming_distance(cws[i], x);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    QuantizationResult r;
    r.message = message_from_index(best, code.k(), code.q());
    r.codeword = cws[best];
    r.distortion = double(best_d) / double(code.n());
    return r;
}

}  // namespace

QuantizationResult quantize_min_cost(const CosetCode& code, const std::vector<double>& costs,
                                     const gf::FieldVector& x, std::size_t state_cap, std::size_t beam) {
    const std::uint32_t q = code.q();
    const std::size_t n = code.n();
    const auto& t = code.trellis(beam > 0 ? ~std::size_t(0) : state_cap);
    // rotate per-position costs by the dither: trellis outputs the linear part
    std::vector<double> rotated(n * q);
    for (std::size_t j = 0; j < n; ++j)
        for (std::uint32_t s = 0; s < q; ++s) rotated[j * q + s] = costs[j * q + (s + code.dither()[j]) % q];
    auto res = beam > 0 ? t.min_cost_beam(rotated, beam) : t.min_cost(rotated);
    std::vector<std::uint8_t> cw(n);
    for (std::size_t j = 0; j < n; ++j) cw[j] = std::uint8_t((res.codeword[j] + code.dither()[j]) % q);
    QuantizationResult out;
    out.codeword = gf::FieldVector(std::move(cw), q);
    out.distortion = gf::hamming_distance(out.codeword, x) / double(n);
    // message in the span-form basis (forward substitution; the original-basis
    // message is not recovered here)
    out.message = span_form_message(t, gf::vec_sub(out.codeword, code.dither()));
    return out;
}

QuantizationResult quantize_min_hamming(const CosetCode& code, const gf::FieldVector& x,
                                        std::size_t state_cap, std::size_t beam) {
    if (x.size() != code.n() || x.modulus() != code.q())
        throw std::invalid_argument("quantize: source shape/modulus mismatch");
    if (code.enumerable()) return exhaustive_min_hamming(code, x);
    const std::uint32_t q = code.q();
    std::vector<double> costs(code.n() * q, 1.0);
    for (std::size_t j = 0; j < code.n(); ++j) costs[j * q + x[j]] = 0.0;
    if (beam > 0) {
        // integer costs create huge tie plateaus that defeat beam pruning;
        // deterministic sub-unit jitter breaks them without changing the
        // Hamming ordering (total jitter stays below one unit)
        std::uint64_t h = 0xcbf29ce484222325ULL ^ code.seed();
        for (std::size_t i = 0; i < x.size(); ++i) h = (h ^ x[i]) * 0x100000001b3ULL;
        Rng jrng(splitmix64(h));
        const double scale = 0.9 / double(code.n() * q);
        for (auto& c : costs) c += scale * jrng.uniform();
    }
    return quantize_min_cost(code, costs, x, state_cap, beam);
}

std::optional<QuantizationResult> quantize_typical(const CosetCode& code, const gf::FieldVector& x,
                                                   const info::JointPmf& joint, double eps) {
    if (!code.enumerable())
        throw std::invalid_argument("quantize_typical requires an enumerable codebook");
    auto cws = enumerate_codebook(code);
    std::vector<int> xs(x.size()), us(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xs[i] = x[i];
    for (std::size_t i = 0; i < cws.size(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) us[j] = cws[i][j];
        if (info::is_jointly_typical({xs, us}, joint, eps)) {
            QuantizationResult r;
            r.message = message_from_index(i, code.k(), code.q());
            r.codeword = cws[i];
            r.distortion = double(gf::hamming_distance(cws[i], x)) / double(code.n());
            return r;
        }
    }
    return std::nullopt;
}

gf::FieldVector span_form_message(const trellis::Trellis& t, const gf::FieldVector& linear_word) {
    const auto& g = t.span_form;
    const std::uint32_t q = g.modulus();
    if (linear_word.size() != g.cols() || linear_word.modulus() != q)
        throw std::invalid_argument("span_form_message: shape mismatch");
    // spans have distinct starts, so solving column-by-column at each row's
    // start column is a forward substitution over the few overlapping rows
    gf::FieldVector msg(g.rows(), q);
    std::vector<std::uint32_t> residual(g.cols());
    for (std::size_t c = 0; c < g.cols(); ++c) residual[c] = linear_word[c];
    for (std::size_t r = 0; r < g.rows(); ++r) {
        std::size_t start = 0;
        while (start < g.cols() && g.at(r, start) == 0) ++start;
        if (start == g.cols()) continue;
        const std::uint32_t u =
            std::uint32_t(std::uint64_t(residual[start]) * gf::inverse_mod(g.at(r, start), q) % q);
        msg.set(r, u);
        if (u)
            for (std::size_t c = start; c < g.cols(); ++c)
                residual[c] = (residual[c] + (q - u % q) * g.at(r, c)) % q;
    }
    for (std::size_t c = 0; c < g.cols(); ++c)
        if (residual[c] != 0) throw std::invalid_argument("span_form_message: word not in the code");
    return msg;
}

gf::FieldVector coset_bin(const CosetCode& inner, const gf::FieldVector& x, std::size_t state_cap,
                          std::size_t beam) {
    return gf::vec_sub(x, quantize_min_hamming(inner, x, state_cap, beam).codeword);
}

gf::FieldVector nearest_codeword(const CosetCode& inner, const gf::FieldVector& y, std::size_t state_cap,
                                 std::size_t beam) {
    return quantize_min_hamming(inner, y, state_cap, beam).codeword;
}

NestedCosetPair build_nested_pair(std::uint32_t q, std::size_t n, std::size_t k_i, std::size_t k_o,
                                  std::uint64_t seed) {
    if (!(k_i < k_o && k_o <= n)) throw std::invalid_argument("nested pair requires k_i < k_o <= n");
    auto g_outer = gf::random_matrix(k_o, n, q, splitmix64(seed));
    auto dither = gf::random_vector(n, q, splitmix64(seed ^ 0xd1fe1ded));
    gf::FieldMatrix g_inner(k_i, n, q);
    for (std::size_t r = 0; r < k_i; ++r)
        for (std::size_t c = 0; c < n; ++c) g_inner.set(r, c, g_outer.at(r, c));
    return NestedCosetPair{CosetCode(std::move(g_inner), dither, seed), CosetCode(std::move(g_outer), dither, seed)};
}

NestedCosetPair build_banded_nested_pair(std::uint32_t q, std::size_t n, std::size_t k_i, std::size_t k_o,
                                         std::size_t window_inner, std::size_t window_delta,
                                         std::uint64_t seed) {
    if (!(k_i < k_o && k_o <= n)) throw std::invalid_argument("nested pair requires k_i < k_o <= n");
    Rng rng(splitmix64(seed));
    gf::FieldMatrix g_inner(k_i, n, q), g_outer(k_o, n, q);
    for (std::size_t r = 0; r < k_i; ++r) {
        fill_banded_row(g_inner, r, banded_start(r, k_i, n, window_inner), window_inner, rng);
        for (std::size_t c = 0; c < n; ++c) g_outer.set(r, c, g_inner.at(r, c));
    }
    const std::size_t extra = k_o - k_i;
    for (std::size_t r = 0; r < extra; ++r)
        fill_banded_row(g_outer, k_i + r, banded_start(r, extra, n, window_delta), window_delta, rng);
    auto dither = gf::random_vector(n, q, splitmix64(seed ^ 0xd1fe1ded));
    return NestedCosetPair{CosetCode(std::move(g_inner), dither, seed), CosetCode(std::move(g_outer), dither, seed)};
}

SharedInnerPair build_shared_inner_pair(std::uint32_t q, std::size_t n, std::size_t k, std::size_t l,
                                        std::size_t lp, std::uint64_t seed) {
    if (k + std::max(l, lp) > n) throw std::invalid_argument("shared-inner pair exceeds dimension budget");
    auto g = gf::random_matrix(k, n, q, splitmix64(seed));
    auto dg = gf::random_matrix(l, n, q, splitmix64(seed ^ 0x9576));
    auto dgp = gf::random_matrix(lp, n, q, splitmix64(seed ^ 0xf00d));
    SharedInnerPair pair;
    pair.shared_k = k;
    pair.c1 = CosetCode(g.stacked(dg), gf::random_vector(n, q, splitmix64(seed ^ 0xb1)), seed);
    pair.c2 = CosetCode(g.stacked(dgp), gf::random_vector(n, q, splitmix64(seed ^ 0xb2)), seed);
    return pair;
}

namespace {

// one banded row with support [start, start+window) and a guaranteed nonzero
void fill_banded_row(gf::FieldMatrix& g, std::size_t row, std::size_t start, std::size_t window, Rng& rng) {
    const std::size_t stop = std::min(g.cols(), start + window);
    bool nonzero = false;
    for (std::size_t c = start; c < stop; ++c) {
        const std::uint32_t v = rng.field_elem(g.modulus());
        g.set(row, c, v);
        nonzero = nonzero || v != 0;
    }
    if (!nonzero && stop > start) g.set(row, start, 1);
}

std::size_t banded_start(std::size_t t, std::size_t total_rows, std::size_t n, std::size_t window) {
    if (total_rows <= 1) return 0;
    return t * (n > window ? n - window : 0) / (total_rows - 1);
}

}  // namespace

SharedInnerPair build_banded_shared_inner_pair(std::uint32_t q, std::size_t n, std::size_t k, std::size_t l,
                                               std::size_t lp, std::size_t window, std::uint64_t seed) {
    if (k + std::max(l, lp) > n) throw std::invalid_argument("shared-inner pair exceeds dimension budget");
    // Both generators draw their row supports from one staggered template of
    // k + max(l, l') positions; the shared block G occupies an evenly spread
    // subset of the template so each code stays banded.
    const std::size_t total = k + std::max(l, lp);
    std::vector<bool> is_shared(total, false);
    if (k > 0)
        for (std::size_t i = 0; i < k; ++i) is_shared[i * total / k] = true;
    std::vector<std::size_t> shared_pos, private_pos;
    for (std::size_t t = 0; t < total; ++t) (is_shared[t] ? shared_pos : private_pos).push_back(t);

    Rng rng(splitmix64(seed));
    gf::FieldMatrix shared(k, n, q);
    for (std::size_t i = 0; i < k; ++i)
        fill_banded_row(shared, i, banded_start(shared_pos[i], total, n, window), window, rng);

    auto mk = [&](std::size_t extra, std::uint64_t salt) {
        Rng prng(splitmix64(seed ^ salt));
        gf::FieldMatrix g(k + extra, n, q);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = 0; c < n; ++c) g.set(i, c, shared.at(i, c));
        for (std::size_t i = 0; i < extra; ++i)
            fill_banded_row(g, k + i, banded_start(private_pos[i], total, n, window), window, prng);
        return g;
    };
    SharedInnerPair pair;
    pair.shared_k = k;
    pair.c1 = CosetCode(mk(l, 0x11), gf::random_vector(n, q, splitmix64(seed ^ 0xb1)), seed);
    pair.c2 = CosetCode(mk(lp, 0x22), gf::random_vector(n, q, splitmix64(seed ^ 0xb2)), seed);
    return pair;
}

CosetCode sum_code(const SharedInnerPair& pair, std::uint32_t alpha, std::uint32_t beta) {
    const std::uint32_t q = pair.c1.q();
    if (alpha % q == 0 || beta % q == 0) throw std::invalid_argument("sum_code requires nonzero scalars");
    if (pair.c2.q() != q || pair.c2.n() != pair.c1.n()) throw std::invalid_argument("sum_code shape mismatch");
    const std::size_t n = pair.c1.n();
    const std::size_t k = pair.shared_k;
    const std::size_t l = pair.c1.k() - k, lp = pair.c2.k() - k;
    // span(G) + alpha span(DG) + beta span(DG'): the shared block enters once
    // since alpha aG + beta bG ranges over span(G) as (a, b) range freely
    gf::FieldMatrix g(k + l + lp, n, q);
    std::size_t row = 0;
    for (std::size_t r = 0; r < k; ++r, ++row)
        for (std::size_t c = 0; c < n; ++c) g.set(row, c, pair.c1.generator().at(r, c));
    for (std::size_t r = 0; r < l; ++r, ++row)
        for (std::size_t c = 0; c < n; ++c)
            g.set(row, c, std::uint8_t(std::uint32_t(alpha) * pair.c1.generator().at(k + r, c) % q));
    for (std::size_t r = 0; r < lp; ++r, ++row)
        for (std::size_t c = 0; c < n; ++c)
            g.set(row, c, std::uint8_t(std::uint32_t(beta) * pair.c2.generator().at(k + r, c) % q));
    auto dither = gf::vec_add(gf::scalar_mul(alpha, pair.c1.dither()), gf::scalar_mul(beta, pair.c2.dither()));
    return CosetCode(std::move(g), std::move(dither), pair.c1.seed());
}

std::size_t SharedInnerEnsemble::intersection_rows(std::uint32_t subset_mask) const {
    std::size_t total = 0;
    for (const auto& [mask, rows] : rows_exactly)
        if ((mask & subset_mask) == subset_mask) total += rows;
    return total;
}

SharedInnerEnsemble build_ensemble(std::uint32_t q, std::size_t n, int m,
                                   const std::map<std::uint32_t, double>& rate_by_subset, std::uint64_t seed) {
    if (m < 1 || m > 16) throw std::invalid_argument("ensemble size out of range");
    const double logq = std::log2(double(q));
    const std::uint32_t full = (1u << m) - 1;
    // target intersection row counts r_J
    std::vector<std::size_t> rows_J(full + 1, 0);
    for (std::uint32_t J = 1; J <= full; ++J) {
        auto it = rate_by_subset.find(J);
        const double rate = it == rate_by_subset.end() ? 0.0 : it->second;
        if (rate < 0) throw std::invalid_argument("negative ensemble rate");
        rows_J[J] = std::size_t(std::llround(rate * double(n) / logq));
    }
    // Moebius inversion: s_K = sum_{J >= K} (-1)^{|J|-|K|} r_J
    std::map<std::uint32_t, std::size_t> s;
    for (std::uint32_t K = 1; K <= full; ++K) {
        long long val = 0;
        // iterate supersets of K
        std::uint32_t rest = full & ~K;
        for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
            const std::uint32_t J = K | sub;
            const int sign = (std::popcount(sub) % 2 == 0) ? 1 : -1;
            val += sign * (long long)(rows_J[J]);
            if (sub == 0) break;
        }
        if (val < 0) throw std::invalid_argument("infeasible ensemble parameter lattice");
        if (val > 0) s[K] = std::size_t(val);
    }
    // per-code row budget check
    SharedInnerEnsemble ens;
    ens.rows_exactly = s;
    Rng rng(splitmix64(seed));
    std::map<std::uint32_t, gf::FieldMatrix> block;
    for (const auto& [K, cnt] : s) block.emplace(K, gf::random_matrix(cnt, n, q, rng.next()));
    for (int i = 0; i < m; ++i) {
        std::size_t ki = 0;
        for (const auto& [K, cnt] : s)
            if (K & (1u << i)) ki += cnt;
        if (ki > n) throw std::invalid_argument("ensemble code exceeds blocklength");
        gf::FieldMatrix g(ki, n, q);
        std::size_t row = 0;
        for (const auto& [K, b] : block) {
            if (!(K & (1u << i))) continue;
            for (std::size_t r = 0; r < b.rows(); ++r, ++row)
                for (std::size_t c = 0; c < n; ++c) g.set(row, c, b.at(r, c));
        }
        ens.codes.emplace_back(std::move(g), gf::random_vector(n, q, rng.next()), seed);
    }
    return ens;
}

}  // namespace mdlab::codes
