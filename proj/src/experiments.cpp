#include "mdlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "mdlab/rng.hpp"

namespace mdlab::experiments {

using codes::CosetCode;
using codes::SharedInnerPair;
using gf::FieldVector;
using info::JointPmf;

namespace {

int hardware_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 2 : int(hc);
}

// deterministic trial-parallel runner: per_trial(t) must only touch slot t
template <class F>
void run_trials(int trials, int workers, F&& per_trial) {
    workers = std::min(hardware_workers(workers), std::max(1, trials));
    if (workers <= 1) {
        for (int t = 0; t < trials; ++t) per_trial(t);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= trials) return;
                per_trial(t);
            }
        });
    }
    for (auto& th : pool) th.join();
}

double half_width(double freq, int n) {
    if (n <= 1) return 1.0;
    return 1.96 * std::sqrt(std::max(freq * (1 - freq), 1e-12) / n);
}

std::vector<int> sample_iid(const std::vector<double>& dist, std::size_t n, Rng& rng) {
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform(), acc = 0;
        int sym = int(dist.size()) - 1;
        for (std::size_t a = 0; a < dist.size(); ++a) {
            acc += dist[a];
            if (u < acc) {
                sym = int(a);
                break;
            }
        }
        out[i] = sym;
    }
    return out;
}

FieldVector to_field(const std::vector<int>& v, std::uint32_t q) {
    std::vector<std::uint8_t> raw(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) raw[i] = std::uint8_t(v[i]);
    return FieldVector(std::move(raw), q);
}

std::vector<int> to_ints(const FieldVector& v) {
    std::vector<int> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

std::size_t window_for(std::size_t states, std::uint32_t q, std::size_t n, std::size_t k) {
    if (k == 0) return 4;
    const double digits = std::floor(std::log2(double(states)) / std::log2(double(q)));
    const double w = digits * double(n) / double(k);
    return std::size_t(std::clamp(w, 4.0, double(n)));
}

}  // namespace

// ---------- calibrated searcher ----------

TypicalSearcher::TypicalSearcher(CosetCode code, ConditionalTarget target, std::size_t state_cap)
    : code_(std::move(code)), target_(std::move(target)), state_cap_(state_cap) {
    theta_.assign(std::size_t(target_.n_ctx) * target_.q, 0.0);
    code_.trellis(state_cap_);  // build eagerly so sharing across threads is read-only
}

FieldVector TypicalSearcher::propose(const std::vector<int>& ctx, std::uint64_t jitter_seed,
                                     double jitter) const {
    const std::uint32_t q = target_.q;
    const std::size_t n = code_.n();
    std::vector<double> costs(n * q);
    Rng rng(jitter_seed);
    for (std::size_t j = 0; j < n; ++j) {
        const int c = ctx[j];
        for (std::uint32_t s = 0; s < q; ++s) {
            const double p = target_.p[std::size_t(c) * q + s];
            const double base = p > 1e-12 ? -std::log2(p) : 60.0;
            const double jit = jitter > 0 ? jitter * rng.uniform() : 0.0;
            costs[j * q + s] = base + theta_[std::size_t(c) * q + s] + jit;
        }
    }
    return codes::quantize_min_cost(code_, costs, FieldVector(n, code_.q()), state_cap_).codeword;
}

void TypicalSearcher::calibrate(const std::function<std::vector<int>(int)>& pilot_ctx, int pilots,
                                int iterations, std::uint64_t seed) {
    const std::uint32_t q = target_.q;
    double eta = 3.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> count(theta_.size(), 0.0), total(std::size_t(target_.n_ctx), 0.0);
        for (int p = 0; p < pilots; ++p) {
            auto ctx = pilot_ctx(p);
            auto cw = propose(ctx, derive_seed(seed, std::uint64_t(it * 131 + p)), 0.15);
            for (std::size_t j = 0; j < cw.size(); ++j) {
                count[std::size_t(ctx[j]) * q + cw[j]] += 1.0;
                total[std::size_t(ctx[j])] += 1.0;
            }
        }
        for (int c = 0; c < target_.n_ctx; ++c) {
            if (total[std::size_t(c)] < 1) continue;
            for (std::uint32_t s = 0; s < q; ++s) {
                const double freq = count[std::size_t(c) * q + s] / total[std::size_t(c)];
                theta_[std::size_t(c) * q + s] += eta * (freq - target_.p[std::size_t(c) * q + s]);
            }
            // keep offsets centered
            double mean = 0;
            for (std::uint32_t s = 0; s < q; ++s) mean += theta_[std::size_t(c) * q + s] / q;
            for (std::uint32_t s = 0; s < q; ++s) theta_[std::size_t(c) * q + s] -= mean;
        }
        eta = std::max(0.5, eta * 0.8);
    }
}

std::optional<FieldVector> TypicalSearcher::search(const std::vector<int>& ctx,
                                                   const std::function<bool(const FieldVector&)>& accept,
                                                   std::uint64_t seed, int retries, double jitter) const {
    for (int r = 0; r < retries; ++r) {
        auto cw = propose(ctx, derive_seed(seed, std::uint64_t(r)), r == 0 ? 0.0 : jitter);
        if (accept(cw)) return cw;
    }
    return std::nullopt;
}

// ---------- covering / packing Monte Carlo ----------

JointPmf covering_test_pmf(double flip) {
    std::vector<double> p(8);
    for (int x = 0; x < 2; ++x)
        for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v)
                p[std::size_t(x * 4 + u * 2 + v)] = 0.5 * ((u ^ x) ? flip : 1 - flip) * ((v ^ x) ? flip : 1 - flip);
    return JointPmf({{"X", 2}, {"U", 2}, {"V", 2}}, std::move(p));
}

SharedInnerPair build_covering_pair(std::uint32_t q, std::size_t n, const CoveringRates& rates,
                                    std::size_t trellis_states, std::uint64_t seed) {
    const double logq = std::log2(double(q));
    const std::size_t k = std::size_t(std::llround(rates.ri * double(n) / logq));
    const std::size_t k1 = std::size_t(std::llround(rates.ro * double(n) / logq));
    const std::size_t k2 = std::size_t(std::llround(rates.rop * double(n) / logq));
    if (k1 < k || k2 < k) throw std::invalid_argument("covering pair requires ri <= min(ro, ro')");
    const std::size_t w = window_for(trellis_states, q, n, std::max(k1, k2));
    return codes::build_banded_shared_inner_pair(q, n, k, k1 - k, k2 - k, w, seed);
}

namespace {

struct PairSearch {
    const SharedInnerPair& pair;
    const JointPmf& pmf;  // (X, U, V)
    double eps;
    std::size_t state_cap;
    int retries;
    std::unique_ptr<TypicalSearcher> s1, s2;
    int x_alpha;
    std::uint32_t q;

    PairSearch(const SharedInnerPair& pr, const JointPmf& p, const ExperimentConfig& cfg)
        : pair(pr), pmf(p), eps(cfg.eps), state_cap(cfg.trellis_states), retries(cfg.search_retries) {
        x_alpha = pmf.alphabet("X");
        q = pair.c1.q();
        const bool exhaustive = (double(pair.c1.k() + pair.c2.k()) * std::log2(double(q))) <= 22.0;
        if (exhaustive) return;
        // stage 1: P(U | X)
        ConditionalTarget t1;
        t1.q = q;
        t1.n_ctx = x_alpha;
        t1.p.assign(std::size_t(x_alpha) * q, 0.0);
        auto pxu = pmf.marginal({"X", "U"});
        auto px = pmf.marginal({"X"});
        for (int x = 0; x < x_alpha; ++x)
            for (std::uint32_t u = 0; u < q; ++u)
                t1.p[std::size_t(x) * q + u] = px.probs()[std::size_t(x)] > 0
                                                   ? pxu.prob({x, int(u)}) / px.probs()[std::size_t(x)]
                                                   : 1.0 / q;
        s1 = std::make_unique<TypicalSearcher>(pair.c1, t1, state_cap);
        // stage 2: P(V | X, U)
        ConditionalTarget t2;
        t2.q = q;
        t2.n_ctx = x_alpha * int(q);
        t2.p.assign(std::size_t(t2.n_ctx) * q, 0.0);
        for (int x = 0; x < x_alpha; ++x)
            for (std::uint32_t u = 0; u < q; ++u) {
                const double pu = pxu.prob({x, int(u)});
                for (std::uint32_t v = 0; v < q; ++v)
                    t2.p[(std::size_t(x) * q + u) * q + v] =
                        pu > 0 ? pmf.prob({x, int(u), int(v)}) / pu : 1.0 / q;
            }
        s2 = std::make_unique<TypicalSearcher>(pair.c2, t2, state_cap);
    }

    void calibrate(std::uint64_t seed) {
        if (!s1) return;
        auto px = pmf.marginal({"X"}).probs();
        const std::size_t n = pair.c1.n();
        s1->calibrate(
            [&](int i) {
                Rng r(derive_seed(seed, 7000 + std::uint64_t(i)));
                return sample_iid(px, n, r);
            },
            4, 10, derive_seed(seed, 1));
        s2->calibrate(
            [&](int i) {
                Rng r(derive_seed(seed, 8000 + std::uint64_t(i)));
                auto xs = sample_iid(px, n, r);
                auto c1 = s1->search(
                    xs, [](const FieldVector&) { return true; }, derive_seed(seed, 8100 + std::uint64_t(i)), 1);
                std::vector<int> ctx(n);
                for (std::size_t j = 0; j < n; ++j) ctx[j] = xs[j] * int(q) + (*c1)[j];
                return ctx;
            },
            4, 10, derive_seed(seed, 2));
    }

    // returns the found pair and stage flags
    struct Found {
        bool stage1 = false, stage2 = false;
        FieldVector c1, c2;
    };

    Found find(const std::vector<int>& xs, std::uint64_t seed) const {
        Found f;
        if (!s1) {  // exhaustive scan in canonical order
            auto cws1 = codes::enumerate_codebook(pair.c1);
            auto cws2 = codes::enumerate_codebook(pair.c2);
            for (const auto& c1 : cws1) {
                for (const auto& c2 : cws2) {
                    if (info::is_jointly_typical({xs, to_ints(c1), to_ints(c2)}, pmf, eps)) {
                        f.stage1 = f.stage2 = true;
                        f.c1 = c1;
                        f.c2 = c2;
                        return f;
                    }
                }
            }
            return f;
        }
        auto pxu = pmf.marginal({"X", "U"});
        auto c1 = s1->search(
            xs,
            [&](const FieldVector& cw) { return info::is_jointly_typical({xs, to_ints(cw)}, pxu, eps); },
            derive_seed(seed, 11), retries);
        if (!c1) return f;
        f.stage1 = true;
        f.c1 = *c1;
        std::vector<int> ctx(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) ctx[j] = xs[j] * int(q) + (*c1)[j];
        auto c2 = s2->search(
            ctx,
            [&](const FieldVector& cw) {
                return info::is_jointly_typical({xs, to_ints(*c1), to_ints(cw)}, pmf, eps);
            },
            derive_seed(seed, 12), retries);
        if (!c2) return f;
        f.stage2 = true;
        f.c2 = *c2;
        return f;
    }
};

}  // namespace

ExperimentReport covering_mc(const SharedInnerPair& pair, const JointPmf& pxuv,
                             const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.name = "covering_mc";
    rep.config = cfg;
    PairSearch search(pair, pxuv, cfg);
    search.calibrate(derive_seed(cfg.seed, 0xCA11));
    auto px = pxuv.marginal({"X"}).probs();

    rep.trial_columns = {"trial", "success", "stage1"};
    rep.trial_rows.assign(std::size_t(cfg.trials), {});
    std::vector<int> wins(std::size_t(cfg.trials), 0), stage1(std::size_t(cfg.trials), 0);
    run_trials(cfg.trials, cfg.workers, [&](int t) {
        Rng rng(derive_seed(cfg.seed, std::uint64_t(t)));
        auto xs = sample_iid(px, cfg.n, rng);
        auto f = search.find(xs, derive_seed(cfg.seed, 0x5EED0 + std::uint64_t(t)));
        wins[std::size_t(t)] = f.stage2 ? 1 : 0;
        stage1[std::size_t(t)] = f.stage1 ? 1 : 0;
        rep.trial_rows[std::size_t(t)] = {double(t), double(wins[std::size_t(t)]), double(stage1[std::size_t(t)])};
    });
    double succ = 0, st1 = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        succ += wins[std::size_t(t)];
        st1 += stage1[std::size_t(t)];
    }
    succ /= std::max(1, cfg.trials);
    st1 /= std::max(1, cfg.trials);
    rep.stats["success"] = succ;
    rep.stats["stage1_success"] = st1;
    rep.stats["success_half_width"] = half_width(succ, cfg.trials);
    rep.rates["r_o"] = pair.c1.rate_bits();
    rep.rates["r_o_prime"] = pair.c2.rate_bits();
    rep.rates["r_i"] = double(pair.shared_k) / double(pair.c1.n()) * std::log2(double(pair.c1.q()));
    return rep;
}

ExperimentReport packing_mc(const SharedInnerPair& pair, double rho1, double rho2, const JointPmf& pxuv,
                            const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.name = "packing_mc";
    rep.config = cfg;
    const std::uint32_t q = pair.c1.q();
    const double logq = std::log2(double(q));
    PairSearch search(pair, pxuv, cfg);
    search.calibrate(derive_seed(cfg.seed, 0xCA11));
    auto px = pxuv.marginal({"X"}).probs();
    auto puv = pxuv.marginal({"U", "V"});

    const auto& t1 = pair.c1.trellis(cfg.trellis_states);
    const auto& t2 = pair.c2.trellis(cfg.trellis_states);
    const std::size_t rows1 = t1.span_form.rows(), rows2 = t2.span_form.rows();
    const std::size_t b1 = std::min(rows1, std::size_t(std::llround(rho1 * double(cfg.n) / logq)));
    const std::size_t b2 = std::min(rows2, std::size_t(std::llround(rho2 * double(cfg.n) / logq)));
    const std::size_t s1 = rows1 - b1, s2 = rows2 - b2;
    const double suffix_bits = double(s1 + s2) * logq;
    const bool exhaustive = suffix_bits <= 22.0;
    const std::size_t samples = 200000;

    const auto windows = info::typicality_windows(puv, cfg.n, cfg.eps);

    // enumerate a bin: fix the span-form prefix digits, walk the suffix digits
    auto bin_words = [&](const trellis::Trellis& t, const FieldVector& dither, const FieldVector& msg,
                         std::size_t bdigits) {
        std::vector<FieldVector> out;
        const auto& g = t.span_form;
        const std::size_t rows = g.rows();
        FieldVector base = dither;
        for (std::size_t r = 0; r < bdigits; ++r)
            if (msg[r])
                base = gf::vec_add(base, gf::scalar_mul(msg[r], FieldVector(
                    std::vector<std::uint8_t>(g.row(r).begin(), g.row(r).end()), q)));
        // walk suffix messages in counter order with incremental row additions
        std::size_t count = 1;
        for (std::size_t i = bdigits; i < rows; ++i) count *= q;
        out.reserve(count);
        std::vector<std::uint8_t> cur(base.raw().begin(), base.raw().end());
        std::vector<std::uint32_t> digits(rows - bdigits, 0);
        for (std::size_t idx = 0;; ++idx) {
            out.emplace_back(cur, q);
            if (idx + 1 == count) break;
            for (std::size_t d = rows - bdigits; d-- > 0;) {
                auto row = g.row(bdigits + d);
                for (std::size_t c = 0; c < cur.size(); ++c) cur[c] = std::uint8_t((cur[c] + row[c]) % q);
                digits[d] = (digits[d] + 1) % q;
                if (digits[d] != 0) break;
            }
        }
        return out;
    };

    rep.trial_columns = {"trial", "covered", "collision"};
    rep.trial_rows.assign(std::size_t(cfg.trials), {});
    std::vector<int> covered(std::size_t(cfg.trials), 0), collision(std::size_t(cfg.trials), 0);

    auto pair_typical = [&](const FieldVector& u, const FieldVector& v) {
        std::vector<long> counts(puv.cells(), 0);
        for (std::size_t j = 0; j < u.size(); ++j) ++counts[std::size_t(u[j]) * q + v[j]];
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (puv.probs()[c] == 0) {
                if (counts[c] != 0) return false;
            } else if (counts[c] < windows.lo[c] || counts[c] > windows.hi[c]) {
                return false;
            }
        }
        return true;
    };

    run_trials(cfg.trials, cfg.workers, [&](int t) {
        Rng rng(derive_seed(cfg.seed, std::uint64_t(t)));
        auto xs = sample_iid(px, cfg.n, rng);
        auto f = search.find(xs, derive_seed(cfg.seed, 0x5EED0 + std::uint64_t(t)));
        if (!f.stage2) {
            rep.trial_rows[std::size_t(t)] = {double(t), 0.0, 0.0};
            return;
        }
        covered[std::size_t(t)] = 1;
        auto m1 = codes::span_form_message(t1, gf::vec_sub(f.c1, pair.c1.dither()));
        auto m2 = codes::span_form_message(t2, gf::vec_sub(f.c2, pair.c2.dither()));
        bool hit = false;
        if (exhaustive) {
            auto bin1 = bin_words(t1, pair.c1.dither(), m1, b1);
            auto bin2 = bin_words(t2, pair.c2.dither(), m2, b2);
            for (std::size_t i = 0; i < bin1.size() && !hit; ++i)
                for (std::size_t j = 0; j < bin2.size(); ++j) {
                    if (bin1[i] == f.c1 && bin2[j] == f.c2) continue;
                    if (pair_typical(bin1[i], bin2[j])) {
                        hit = true;
                        break;
                    }
                }
        } else {
            // bins are astronomically large; sample uniformly inside them
            Rng srng(derive_seed(cfg.seed, 0xB1B0 + std::uint64_t(t)));
            for (std::size_t it = 0; it < samples && !hit; ++it) {
                FieldVector w1 = f.c1, w2 = f.c2;
                auto add_random_suffix = [&](const trellis::Trellis& tr, FieldVector& w, std::size_t bd) {
                    const auto& g = tr.span_form;
                    for (std::size_t r = bd; r < g.rows(); ++r) {
                        const std::uint32_t d = srng.field_elem(q);
                        if (d)
                            for (std::size_t c = 0; c < w.size(); ++c)
                                w.set(c, (w[c] + d * g.at(r, c)) % q);
                    }
                };
                add_random_suffix(t1, w1, b1);
                add_random_suffix(t2, w2, b2);
                if (w1 == f.c1 && w2 == f.c2) continue;
                if (pair_typical(w1, w2)) hit = true;
            }
        }
        collision[std::size_t(t)] = hit ? 1 : 0;
        rep.trial_rows[std::size_t(t)] = {double(t), 1.0, double(collision[std::size_t(t)])};
    });

    int ncov = 0, nerr = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        ncov += covered[std::size_t(t)];
        nerr += collision[std::size_t(t)];
    }
    rep.stats["covered_trials"] = ncov;
    rep.stats["collision_error"] = ncov > 0 ? double(nerr) / ncov : 0.0;
    rep.stats["collision_half_width"] = half_width(rep.stats["collision_error"], std::max(1, ncov));
    rep.stats["exhaustive_bins"] = exhaustive ? 1.0 : 0.0;
    rep.rates["rho1"] = double(b1) * logq / double(cfg.n);
    rep.rates["rho2"] = double(b2) * logq / double(cfg.n);
    return rep;
}

RedundancyCheck packing_redundancy_check(int samples, std::uint64_t seed) {
    RedundancyCheck out;
    Rng rng(seed);
    while (out.sampled < samples) {
        // random PMF on (X, U, V) over F_2 and random rate tuple
        std::vector<double> p(8);
        double sum = 0;
        for (auto& x : p) {
            x = rng.uniform() + 1e-3;
            sum += x;
        }
        for (auto& x : p) x /= sum;
        JointPmf pmf({{"X", 2}, {"U", 2}, {"V", 2}}, p);
        auto ws = pmf.with_function_variable("W", 2, [](const std::vector<int>& a) { return a[1] ^ a[2]; });
        const double hU_X = pmf.conditional_entropy({"U"}, {"X"});
        const double hV_X = pmf.conditional_entropy({"V"}, {"X"});
        const double hUV_X = pmf.conditional_entropy({"U", "V"}, {"X"});
        const double hW_X = ws.conditional_entropy({"W"}, {"X"});
        const double hU_V = pmf.conditional_entropy({"U"}, {"V"});
        const double hV_U = pmf.conditional_entropy({"V"}, {"U"});
        const double hUV = pmf.entropy({"U", "V"});

        const double ro = rng.uniform(), rop = rng.uniform();
        const double ri = rng.uniform() * std::min(ro, rop);
        const double rho1 = rng.uniform() * ro, rho2 = rng.uniform() * rop;
        const bool covering = ro >= 1 - hU_X && rop >= 1 - hV_X && ro + rop >= 2 - hUV_X &&
                              ro + rop - ri >= 1 - hW_X;
        const bool packing = ro - rho1 <= 1 - hU_V && rop - rho2 <= 1 - hV_U &&
                             (ro - rho1) + (rop - rho2) <= 2 - hUV;
        if (!covering || !packing) continue;
        ++out.sampled;
        // the dropped bound: r_i - rho1 - rho2 <= log q - H(U,V | U + V)
        const double hUV_W = pmf.entropy({"U", "V"}) - ws.entropy({"W"});
        if (ri - rho1 - rho2 <= 1 - (hUV - ws.entropy({"W"})) + 1e-9) ++out.implied;
        (void)hUV_W;
    }
    return out;
}

// ---------- Example 4 ----------

ExperimentReport run_vecsource(double delta, const ExperimentConfig& cfg) {
    if (!(delta > 0 && delta < 0.5)) throw std::invalid_argument("run_vecsource requires 0 < delta < 1/2");
    ExperimentReport rep;
    rep.name = "vecsource";
    rep.config = cfg;
    const std::size_t n = cfg.n;
    const double rate = 1 - info::binary_entropy(delta) + cfg.rate_pad;
    const std::size_t k = std::size_t(std::llround(rate * double(n)));
    const std::size_t w = window_for(cfg.trellis_states, 2, n, k);

    // best-of-T code search scored by pilot quantization distortion
    CosetCode best;
    double best_score = 1e9;
    for (int c = 0; c < cfg.best_of; ++c) {
        auto code = codes::build_banded_code(2, n, k, w, derive_seed(cfg.seed, 0xC0DE + std::uint64_t(c)));
        double score = 0;
        const int pilots = 4;
        for (int p = 0; p < pilots; ++p) {
            auto x = gf::random_vector(n, 2, derive_seed(cfg.seed, 0x9100 + std::uint64_t(p)));
            score += codes::quantize_min_hamming(code, x, cfg.trellis_states).distortion;
        }
        score /= pilots;
        if (score < best_score) {
            best_score = score;
            best = code;
        }
    }
    if (best_score > delta + 0.05)
        throw std::runtime_error("vecsource code search failed: best pilot distortion " +
                                 std::to_string(best_score));

    rep.trial_columns = {"trial", "d1", "d2", "d3", "linearity_ok"};
    rep.trial_rows.assign(std::size_t(cfg.trials), {});
    run_trials(cfg.trials, cfg.workers, [&](int t) {
        Rng rng(derive_seed(cfg.seed, std::uint64_t(t)));
        auto x = gf::random_vector(n, 2, rng.next());
        auto z = gf::random_vector(n, 2, rng.next());
        auto xq = codes::quantize_min_hamming(best, x, cfg.trellis_states).codeword;
        auto zq = codes::quantize_min_hamming(best, z, cfg.trellis_states).codeword;
        const double d1 = double(gf::hamming_distance(x, xq)) / double(n);
        const double d2 = double(gf::hamming_distance(z, zq)) / double(n);
        auto sum = gf::vec_add(xq, zq);
        const double d3 = double(gf::hamming_distance(sum, gf::vec_add(x, z))) / double(n);
        // decoders {1,3}/{2,3} recover the other quantization by adding codewords
        const bool linear_ok = gf::vec_add(sum, xq) == zq && gf::vec_add(sum, zq) == xq;
        rep.trial_rows[std::size_t(t)] = {double(t), d1, d2, d3, linear_ok ? 1.0 : 0.0};
    });

    double d1 = 0, d2 = 0, d3 = 0, lin = 0;
    for (const auto& row : rep.trial_rows) {
        d1 += row[1];
        d2 += row[2];
        d3 += row[3];
        lin += row[4];
    }
    const double m = std::max(1, cfg.trials);
    d1 /= m;
    d2 /= m;
    d3 /= m;
    rep.rates = {{"R1", double(k) / double(n)}, {"R2", double(k) / double(n)}, {"R3", double(k) / double(n)}};
    rep.distortions = {{"D{1}", d1},          {"D{2}", d2},   {"D{3}", d3},
                       {"D{1,2}", d1 + d2},   {"D{1,3}", d1 + d2},
                       {"D{2,3}", d1 + d2}};
    rep.stats["convolution_gap"] = std::abs(d3 - info::binary_convolve(d1, d2));
    rep.stats["linearity_ok"] = lin / m;
    rep.stats["pilot_distortion"] = best_score;
    return rep;
}

// ---------- Example 5 ----------

ExperimentReport run_vecbin(double p, const ExperimentConfig& cfg) {
    if (!(p > 0 && p < 0.5)) throw std::invalid_argument("run_vecbin requires 0 < p < 1/2");
    ExperimentReport rep;
    rep.name = "vecbin";
    rep.config = cfg;
    const std::size_t n = cfg.n;
    const double hb = info::binary_entropy(p);
    // The inner code fights a genuine finite-n channel-coding problem at
    // BSC(p); the banded ensemble needs about twice the outer padding to put
    // its maximum-likelihood block error safely under the 5% target.
    const std::size_t k_i = std::size_t(std::llround((1 - hb - 2 * cfg.rate_pad) * double(n)));
    const std::size_t k_o = std::size_t(std::llround((1 - hb + cfg.rate_pad) * double(n)));
    const std::size_t w_inner = std::min<std::size_t>(64, n / 4);
    const std::size_t w_delta = 10;
    const std::size_t beam = cfg.trellis_states;
    const std::size_t outer_cap = std::size_t(1) << 40;

    // best-of-T nested pairs: the inner code is scored as a channel code for
    // BSC(p), the outer as a source code at distortion p. The binning is by
    // cosets of the linear inner code, so both codes carry zero dither.
    codes::NestedCosetPair best;
    double best_err = 1e9, best_dist = 1e9;
    const int chan_pilots = 24, src_pilots = 3;
    for (int c = 0; c < cfg.best_of; ++c) {
        auto drawn = codes::build_banded_nested_pair(2, n, k_i, k_o, w_inner, w_delta,
                                                     derive_seed(cfg.seed, 0xBEEF + std::uint64_t(c)));
        codes::NestedCosetPair pair{codes::linear_code(drawn.inner.generator()),
                                    codes::linear_code(drawn.outer.generator())};
        int errors = 0;
        for (int t = 0; t < chan_pilots; ++t) {
            Rng rng(derive_seed(cfg.seed, 0x3100 + std::uint64_t(t)));
            FieldVector noise(n, 2);
            for (std::size_t i = 0; i < n; ++i) noise.set(i, rng.bernoulli(p) ? 1 : 0);
            errors += codes::coset_bin(pair.inner, noise, outer_cap, beam) == noise ? 0 : 1;
        }
        const double err = double(errors) / chan_pilots;
        double dist = 0;
        if (err <= best_err) {
            for (int t = 0; t < src_pilots; ++t) {
                auto x = gf::random_vector(n, 2, derive_seed(cfg.seed, 0x3200 + std::uint64_t(t)));
                dist += codes::quantize_min_hamming(pair.outer, x, outer_cap, beam).distortion;
            }
            dist /= src_pilots;
            if (err < best_err || dist < best_dist) {
                best_err = err;
                best_dist = dist;
                best = pair;
            }
        }
    }
    if (best_err > 0.25)
        throw std::runtime_error("vecbin code search failed: inner pilot block error " + std::to_string(best_err));
    if (best_dist > p + 0.05)
        throw std::runtime_error("vecbin code search failed: outer pilot distortion " + std::to_string(best_dist));

    rep.trial_columns = {"trial", "d1", "d4", "err12", "err34", "err23", "identity_ok"};
    rep.trial_rows.assign(std::size_t(cfg.trials), {});
    run_trials(cfg.trials, cfg.workers, [&](int t) {
        Rng rng(derive_seed(cfg.seed, std::uint64_t(t)));
        FieldVector z(n, 2), np(n, 2);
        for (std::size_t i = 0; i < n; ++i) z.set(i, std::uint32_t(rng.below(2)));
        for (std::size_t i = 0; i < n; ++i) np.set(i, rng.bernoulli(p) ? 1 : 0);
        auto x = gf::vec_add(z, np);

        auto qo_x = codes::quantize_min_hamming(best.outer, x, outer_cap, beam).codeword;
        auto qo_z = codes::quantize_min_hamming(best.outer, z, outer_cap, beam).codeword;
        auto bi_x = codes::coset_bin(best.inner, x, outer_cap, beam);
        auto bi_z = codes::coset_bin(best.inner, z, outer_cap, beam);

        const double d1 = double(gf::hamming_distance(x, qo_x)) / double(n);
        const double d4 = double(gf::hamming_distance(z, qo_z)) / double(n);

        // decoder {1,2}: recover x from the outer quantization and the inner bin
        auto decode_with = [&](const FieldVector& qo, const FieldVector& bi, const FieldVector& truth) {
            auto residue = gf::vec_sub(bi, qo);  // == truth - qo (mod inner code)
            auto yhat = codes::coset_bin(best.inner, residue, outer_cap, beam);
            return gf::vec_add(qo, yhat) == truth;
        };
        const bool ok12 = decode_with(qo_x, bi_x, x);
        const bool ok34 = decode_with(qo_z, bi_z, z);
        // decoder {2,3}: recover x + z from the two bins
        auto s = gf::vec_add(bi_x, bi_z);
        auto what = codes::coset_bin(best.inner, s, outer_cap, beam);
        const bool ok23 = what == np;
        // Example 5 identity: B(x) + B(z) = x + z + Q(x) + Q(z)
        auto qi_x = gf::vec_sub(x, bi_x);
        auto qi_z = gf::vec_sub(z, bi_z);
        const bool ident = gf::vec_add(bi_x, bi_z) == gf::vec_add(gf::vec_add(x, z), gf::vec_add(qi_x, qi_z));

        rep.trial_rows[std::size_t(t)] = {double(t), d1,  d4, ok12 ? 0.0 : 1.0, ok34 ? 0.0 : 1.0,
                                          ok23 ? 0.0 : 1.0, ident ? 1.0 : 0.0};
    });

    double d1 = 0, d4 = 0, e12 = 0, e34 = 0, e23 = 0, ident = 0;
    for (const auto& row : rep.trial_rows) {
        d1 += row[1];
        d4 += row[2];
        e12 += row[3];
        e34 += row[4];
        e23 += row[5];
        ident += row[6];
    }
    const double m = std::max(1, cfg.trials);
    rep.rates = {{"R1", double(k_o) / double(n)},
                 {"R2", double(n - k_i) / double(n)},
                 {"R3", double(n - k_i) / double(n)},
                 {"R4", double(k_o) / double(n)}};
    rep.distortions = {{"D{1}", d1 / m}, {"D{4}", d4 / m}};
    rep.stats = {{"err{1,2}", e12 / m},       {"err{3,4}", e34 / m}, {"err{2,3}", e23 / m},
                 {"identity_ok", ident / m},  {"inner_pilot_error", best_err},
                 {"outer_pilot_distortion", best_dist}};
    return rep;
}

// ---------- Example 6 ----------

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

double scalar_alpha(double d0) {
    return std::log2((1 - 2 * (kSqrt2 - 1) * d0) / (2 * (2 - kSqrt2) * d0));
}
double scalar_beta(double d0) {
    return -std::log2((1 - 2 * (kSqrt2 - 1) * (1 - d0)) / (2 * (2 - kSqrt2) * (1 - d0)));
}
double scalar_r3_bound(double d0) {
    return 0.5 + info::binary_entropy(kSqrt2 - 1) - info::binary_entropy(kSqrt2 / 2) -
           info::binary_entropy(d0) / 2;
}
double scalar_d3_bound(double d0) {
    return scalar_alpha(d0) * (kSqrt2 - 1) * d0 +
           scalar_beta(d0) * ((3 - 2 * kSqrt2) / 2 * (1 - d0) + d0 / 2);
}
double scalar_side_distortion(double d0) { return (1 - (1 - 2 * d0) * (2 - kSqrt2)) / 2; }
double scalar_nonred_constraint(double d0) {
    return info::binary_entropy(d0) + 2 * info::binary_entropy(kSqrt2 / 2) -
           info::binary_entropy(2 * (kSqrt2 - 1) * d0) - info::binary_entropy(2 * (kSqrt2 - 1) * (1 - d0));
}

ExperimentReport run_scalar(double d0, const ExperimentConfig& cfg) {
    if (!(d0 > 0 && d0 < 0.5)) throw std::invalid_argument("run_scalar requires 0 < D0 < 1/2");
    ExperimentReport rep;
    rep.name = "scalar";
    rep.config = cfg;
    const std::size_t n = cfg.n;
    auto table = info::table1_pmf(d0);
    const double h_pair = table.conditional_entropy({"V1", "V2"}, {"X"});
    const double h_v1 = table.entropy({"V1"});
    auto with_w = table.with_function_variable("W", 2, [](const std::vector<int>& a) { return a[1] ^ a[2]; });
    const double h_w = with_w.entropy({"W"});
    const double alpha = scalar_alpha(d0), beta = scalar_beta(d0);

    const double r = 1 - h_pair / 2 + cfg.rate_pad;
    const std::size_t k = std::size_t(std::llround(r * double(n)));
    const std::size_t w = window_for(cfg.trellis_states, 2, n, k);
    const double eps_bins = cfg.rate_pad + cfg.pack_pad;
    const double rho1 = h_v1 - h_pair / 2 + eps_bins;
    const double rho3 = h_w - h_pair / 2 + eps_bins;

    auto pxv1 = table.marginal({"X", "V1"});

    // conditional targets
    ConditionalTarget t1;  // P(V1 | X)
    t1.q = 2;
    t1.n_ctx = 2;
    t1.p.resize(4);
    for (int x = 0; x < 2; ++x)
        for (int v = 0; v < 2; ++v) t1.p[std::size_t(x * 2 + v)] = pxv1.prob({x, v}) * 2.0;
    ConditionalTarget t2;  // P(V1 + V2 | X, V1)
    t2.q = 2;
    t2.n_ctx = 4;
    t2.p.resize(8);
    for (int x = 0; x < 2; ++x)
        for (int v1 = 0; v1 < 2; ++v1) {
            const double den = table.prob({x, v1, 0}) + table.prob({x, v1, 1});
            for (int s = 0; s < 2; ++s)
                t2.p[std::size_t((x * 2 + v1) * 2 + s)] =
                    den > 0 ? table.prob({x, v1, v1 ^ s}) / den : 0.5;
        }

    // best-of code search scored by pilot covering success
    std::unique_ptr<TypicalSearcher> s1, s2;
    CosetCode code, diff;
    {
        double best_score = -1;
        const int tries = std::max(1, std::min(cfg.best_of, 6));
        for (int c = 0; c < tries; ++c) {
            auto cand = codes::build_banded_code(2, n, k, w, derive_seed(cfg.seed, 0x5CA1A + std::uint64_t(c)));
            auto cand_diff = codes::linear_code(cand.generator());
            auto cs1 = std::make_unique<TypicalSearcher>(cand, t1, cfg.trellis_states);
            auto cs2 = std::make_unique<TypicalSearcher>(cand_diff, t2, cfg.trellis_states);
            cs1->calibrate(
                [&](int i) {
                    Rng rr(derive_seed(cfg.seed, 0x7100 + std::uint64_t(i)));
                    return sample_iid({0.5, 0.5}, n, rr);
                },
                4, 10, derive_seed(cfg.seed, 0x7200 + std::uint64_t(c)));
            cs2->calibrate(
                [&](int i) {
                    Rng rr(derive_seed(cfg.seed, 0x7300 + std::uint64_t(i)));
                    auto xs = sample_iid({0.5, 0.5}, n, rr);
                    auto c1 = cs1->search(
                        xs, [](const FieldVector&) { return true; },
                        derive_seed(cfg.seed, 0x7400 + std::uint64_t(i)), 1);
                    std::vector<int> ctx(n);
                    for (std::size_t j = 0; j < n; ++j) ctx[j] = xs[j] * 2 + (*c1)[j];
                    return ctx;
                },
                4, 10, derive_seed(cfg.seed, 0x7500 + std::uint64_t(c)));
            // pilot covering score
            int ok = 0;
            const int pilots = 6;
            for (int ptl = 0; ptl < pilots; ++ptl) {
                Rng rr(derive_seed(cfg.seed, 0x7600 + std::uint64_t(ptl)));
                auto xs = sample_iid({0.5, 0.5}, n, rr);
                auto c1 = cs1->search(
                    xs,
                    [&](const FieldVector& cw) {
                        return info::is_jointly_typical({xs, to_ints(cw)}, pxv1, cfg.eps);
                    },
                    derive_seed(cfg.seed, 0x7700 + std::uint64_t(ptl)), cfg.search_retries);
                if (!c1) continue;
                std::vector<int> ctx(n);
                for (std::size_t j = 0; j < n; ++j) ctx[j] = xs[j] * 2 + (*c1)[j];
                auto ws = cs2->search(
                    ctx,
                    [&](const FieldVector& cw) {
                        auto c2 = gf::vec_add(*c1, cw);
                        return info::is_jointly_typical({xs, to_ints(*c1), to_ints(c2)}, table, cfg.eps);
                    },
                    derive_seed(cfg.seed, 0x7800 + std::uint64_t(ptl)), cfg.search_retries);
                if (ws) ++ok;
            }
            if (double(ok) > best_score) {
                best_score = double(ok);
                code = cand;
                diff = cand_diff;
                s1 = std::move(cs1);
                s2 = std::move(cs2);
            }
            if (best_score == pilots) break;
        }
    }

    const auto& trellis = code.trellis(cfg.trellis_states);
    const std::size_t rows = trellis.span_form.rows();
    const std::size_t b1 = std::min(rows, std::size_t(std::llround(rho1 * double(n))));
    const std::size_t b3 = std::min(rows, std::size_t(std::llround(rho3 * double(n))));

    // suffix codes for in-bin decoding
    auto make_suffix = [&](std::size_t bd) {
        gf::FieldMatrix g(rows - bd, n, 2);
        for (std::size_t rr = bd; rr < rows; ++rr)
            for (std::size_t c = 0; c < n; ++c) g.set(rr - bd, c, trellis.span_form.at(rr, c));
        return codes::linear_code(std::move(g));
    };
    auto suffix1 = make_suffix(b1);
    auto suffix3 = make_suffix(b3);
    suffix1.trellis(cfg.trellis_states);
    suffix3.trellis(cfg.trellis_states);

    auto prefix_part = [&](const FieldVector& msg, std::size_t bd) {
        FieldVector acc(n, 2);
        for (std::size_t rr = 0; rr < bd; ++rr) {
            if (!msg[rr]) continue;
            for (std::size_t c = 0; c < n; ++c)
                acc.set(c, (acc[c] + trellis.span_form.at(rr, c)) % 2);
        }
        return acc;
    };

    // ML-in-bin decoding: min cost over {offset + suffix-code}
    auto decode_bin = [&](const CosetCode& suffix, const FieldVector& offset, const double* logp) {
        std::vector<double> costs(n * 2);
        for (std::size_t j = 0; j < n; ++j)
            for (int sym = 0; sym < 2; ++sym) costs[j * 2 + std::size_t(sym)] = logp[(sym + offset[j]) % 2];
        auto res = suffix.trellis(cfg.trellis_states).min_cost(costs);
        FieldVector out(n, 2);
        for (std::size_t j = 0; j < n; ++j) out.set(j, (res.codeword[j] + offset[j]) % 2);
        return out;
    };
    const double pm_v1[2] = {-std::log2(1 - (2 - kSqrt2) / 2), -std::log2((2 - kSqrt2) / 2)};
    const double pw1 = kSqrt2 - 1;
    const double pm_w[2] = {-std::log2(1 - pw1), -std::log2(pw1)};

    rep.trial_columns = {"trial",  "covered", "d1",   "d2",   "d3",   "d12",
                         "d13",    "d23",     "err1", "err2", "err3"};
    rep.trial_rows.assign(std::size_t(cfg.trials), {});

    run_trials(cfg.trials, cfg.workers, [&](int t) {
        auto& row = rep.trial_rows[std::size_t(t)];
        row.assign(11, 0.0);
        row[0] = t;
        Rng rng(derive_seed(cfg.seed, std::uint64_t(t)));
        auto xs = sample_iid({0.5, 0.5}, n, rng);
        auto c1 = s1->search(
            xs,
            [&](const FieldVector& cw) { return info::is_jointly_typical({xs, to_ints(cw)}, pxv1, cfg.eps); },
            derive_seed(cfg.seed, 0x8100 + std::uint64_t(t)), cfg.search_retries);
        if (!c1) return;
        std::vector<int> ctx(n);
        for (std::size_t j = 0; j < n; ++j) ctx[j] = xs[j] * 2 + (*c1)[j];
        auto wv = s2->search(
            ctx,
            [&](const FieldVector& cw) {
                auto c2 = gf::vec_add(*c1, cw);
                return info::is_jointly_typical({xs, to_ints(*c1), to_ints(c2)}, table, cfg.eps);
            },
            derive_seed(cfg.seed, 0x8200 + std::uint64_t(t)), cfg.search_retries);
        if (!wv) return;
        row[1] = 1.0;
        auto c2 = gf::vec_add(*c1, *wv);

        auto m1 = codes::span_form_message(trellis, gf::vec_sub(*c1, code.dither()));
        auto m2 = codes::span_form_message(trellis, gf::vec_sub(c2, code.dither()));
        auto m3 = gf::vec_add(m1, m2);

        // decode each description from its bin
        auto off1 = gf::vec_add(prefix_part(m1, b1), code.dither());
        auto off2 = gf::vec_add(prefix_part(m2, b1), code.dither());
        auto off3 = prefix_part(m3, b3);  // the sum code is linear (dithers cancel)
        auto d1hat = decode_bin(suffix1, off1, pm_v1);
        auto d2hat = decode_bin(suffix1, off2, pm_v1);
        auto d3hat = decode_bin(suffix3, off3, pm_w);
        row[8] = d1hat == *c1 ? 0.0 : 1.0;
        row[9] = d2hat == c2 ? 0.0 : 1.0;
        row[10] = d3hat == gf::vec_add(*c1, c2) ? 0.0 : 1.0;

        // reconstructions
        auto pair_rule = [&](const FieldVector& a, const FieldVector& b) {
            double acc = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const int xhat = (a[j] == 0 && b[j] == 0) ? 0 : 1;
                acc += xhat != xs[j];
            }
            return acc / double(n);
        };
        double dd1 = 0, dd2 = 0, dd3 = 0;
        for (std::size_t j = 0; j < n; ++j) {
            dd1 += d1hat[j] != xs[j];
            dd2 += d2hat[j] != xs[j];
            dd3 += xs[j] == 0 ? (d3hat[j] == 1 ? alpha : 0.0) : (d3hat[j] == 0 ? beta : 0.0);
        }
        row[2] = dd1 / double(n);
        row[3] = dd2 / double(n);
        row[4] = dd3 / double(n);
        row[5] = pair_rule(d1hat, d2hat);
        row[6] = pair_rule(d1hat, gf::vec_add(d1hat, d3hat));
        row[7] = pair_rule(gf::vec_add(d2hat, d3hat), d2hat);
    });

    double covered = 0, d1 = 0, d2 = 0, d3 = 0, d12 = 0, d13 = 0, d23 = 0, e1 = 0, e2 = 0, e3 = 0;
    for (const auto& row : rep.trial_rows) {
        covered += row[1];
        if (row[1] == 0) continue;
        d1 += row[2];
        d2 += row[3];
        d3 += row[4];
        d12 += row[5];
        d13 += row[6];
        d23 += row[7];
        e1 += row[8];
        e2 += row[9];
        e3 += row[10];
    }
    const double denom = std::max(covered, 1.0);
    rep.rates = {{"R1", double(b1) / double(n)},
                 {"R2", double(b1) / double(n)},
                 {"R3", double(b3) / double(n)}};
    rep.distortions = {{"D{1}", d1 / denom},   {"D{2}", d2 / denom},   {"D{3}", d3 / denom},
                       {"D{1,2}", d12 / denom}, {"D{1,3}", d13 / denom}, {"D{2,3}", d23 / denom},
                       {"D{1,2,3}", d12 / denom}};
    rep.stats = {{"covering_failure", 1.0 - covered / std::max(1, cfg.trials)},
                 {"bin_error1", e1 / denom},
                 {"bin_error2", e2 / denom},
                 {"bin_error3", e3 / denom},
                 {"R3_formula", scalar_r3_bound(d0)},
                 {"D3_formula", scalar_d3_bound(d0)},
                 {"side_formula", scalar_side_distortion(d0)}};
    if (rep.stats["covering_failure"] > 0.2)
        throw std::runtime_error("run_scalar covering failure rate " +
                                 std::to_string(rep.stats["covering_failure"]) + " (n too small for D0)");
    return rep;
}

// ---------- Figure-D sweep ----------

namespace {

struct FigdContext {
    double t1[2][2][2];   // table1 cells [x][x1][x2]
    double pj[2][2];      // P(X3 = x3, X = x)
};

// objective at one grid point; returns false when the solved conditionals are
// negative (the point does not correspond to a distribution)
bool figd_value(const FigdContext& c, double a0, double a1, double b0, double b1, double& value) {
    const double alpha[2][2] = {{1 - a0, a0}, {1 - a1, a1}};  // alpha[x1][theta]
    const double beta[2][2] = {{1 - b0, b0}, {1 - b1, b1}};
    const double det = c.pj[0][0] * c.pj[1][1] - c.pj[1][0] * c.pj[0][1];
    double A[2][2][2];  // A[x3][theta][gamma]
    for (int th = 0; th < 2; ++th)
        for (int ga = 0; ga < 2; ++ga) {
            double rhs[2] = {0, 0};
            for (int x = 0; x < 2; ++x)
                for (int x1 = 0; x1 < 2; ++x1)
                    for (int x2 = 0; x2 < 2; ++x2)
                        rhs[x] += alpha[x1][th] * beta[x2][ga] * c.t1[x][x1][x2];
            const double A0 = (rhs[0] * c.pj[1][1] - rhs[1] * c.pj[1][0]) / det;
            const double A1 = (c.pj[0][0] * rhs[1] - c.pj[0][1] * rhs[0]) / det;
            if (A0 < -1e-9 || A1 < -1e-9) return false;
            A[0][th][ga] = std::max(A0, 0.0);
            A[1][th][ga] = std::max(A1, 0.0);
        }
    // joint over (theta, gamma, x1, x2, x3, x) and the two objective marginals
    double m1[32] = {0}, m1x[16] = {0};  // (th,ga,x1,x3 | x), marginal over x
    double m2[32] = {0}, m2x[16] = {0};
    for (int th = 0; th < 2; ++th)
        for (int ga = 0; ga < 2; ++ga)
            for (int x = 0; x < 2; ++x) {
                double denom = 0;
                for (int x3 = 0; x3 < 2; ++x3) denom += A[x3][th][ga] * c.pj[x3][x];
                if (denom <= 0) continue;
                for (int x1 = 0; x1 < 2; ++x1)
                    for (int x2 = 0; x2 < 2; ++x2) {
                        const double base = c.t1[x][x1][x2] * alpha[x1][th] * beta[x2][ga];
                        if (base <= 0) continue;
                        for (int x3 = 0; x3 < 2; ++x3) {
                            const double pr = base * A[x3][th][ga] * c.pj[x3][x] / denom;
                            if (pr <= 0) continue;
                            const int i1 = ((th * 2 + ga) * 2 + x1) * 2 + x3;
                            const int i2 = ((th * 2 + ga) * 2 + x2) * 2 + x3;
                            m1[i1 * 2 + x] += pr;
                            m1x[i1] += pr;
                            m2[i2 * 2 + x] += pr;
                            m2x[i2] += pr;
                        }
                    }
            }
    auto ent = [](const double* p, int len) {
        double h = 0;
        for (int i = 0; i < len; ++i)
            if (p[i] > 0) h -= p[i] * std::log2(p[i]);
        return h;
    };
    // I(A; X) = H(A) + H(X) - H(A, X), H(X) = 1
    const double i1 = ent(m1x, 16) + 1.0 - ent(m1, 32);
    const double i2 = ent(m2x, 16) + 1.0 - ent(m2, 32);
    value = i1 + i2;
    return true;
}

}  // namespace

FigdResult figd_sweep(double d0, const FigdOptions& opt) {
    if (!(d0 > 0 && d0 < 0.5)) throw std::invalid_argument("figd_sweep requires 0 < D0 < 1/2");
    if (scalar_nonred_constraint(d0) < 1.0 - 0.02)
        throw std::invalid_argument("figd_sweep: the scalar example's covering constraint is not met at D0=" +
                                    std::to_string(d0));
    FigdContext ctx;
    {
        auto table = info::table1_pmf(d0);
        for (int x = 0; x < 2; ++x)
            for (int x1 = 0; x1 < 2; ++x1)
                for (int x2 = 0; x2 < 2; ++x2) ctx.t1[x][x1][x2] = table.prob({x, x1, x2});
        auto ba = info::blahut_arimoto_target_rate({0.5, 0.5},
                                                   info::alpha_beta_distortion(scalar_alpha(d0), scalar_beta(d0)),
                                                   scalar_r3_bound(d0), 1e-11);
        for (int x = 0; x < 2; ++x)
            for (int x3 = 0; x3 < 2; ++x3) ctx.pj[x3][x] = 0.5 * ba.channel[std::size_t(x)][std::size_t(x3)];
    }

    const int steps = int(std::llround(1.0 / opt.grid_step)) + 1;
    auto at = [&](int i) { return std::min(1.0, double(i) * opt.grid_step); };

    FigdResult res;
    res.bound = 2 * (1 - info::binary_entropy(d0));
    res.grid_points = std::size_t(steps) * steps * steps * steps;
    res.slice.assign(std::size_t(steps) * steps, {0, 0, -1});

    const int workers = hardware_workers(opt.workers);
    std::vector<double> best_val(std::size_t(workers), -1);
    std::vector<std::array<double, 4>> best_arg(std::size_t(workers), {0, 0, 0, 0});
    std::vector<std::size_t> evaluated(std::size_t(workers), 0);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int wk = 0; wk < workers; ++wk) {
        pool.emplace_back([&, wk] {
            for (;;) {
                const int i0 = next.fetch_add(1);
                if (i0 >= steps) return;
                const double a0 = at(i0);
                for (int i1 = 0; i1 < steps; ++i1) {
                    const double a1 = at(i1);
                    double slice_best = -1;
                    for (int j0 = 0; j0 < steps; ++j0) {
                        const double b0 = at(j0);
                        for (int j1 = 0; j1 < steps; ++j1) {
                            double v;
                            if (!figd_value(ctx, a0, a1, b0, at(j1), v)) continue;
                            ++evaluated[std::size_t(wk)];
                            slice_best = std::max(slice_best, v);
                            if (v > best_val[std::size_t(wk)]) {
                                best_val[std::size_t(wk)] = v;
                                best_arg[std::size_t(wk)] = {a0, a1, b0, at(j1)};
                            }
                        }
                    }
                    res.slice[std::size_t(i0) * std::size_t(steps) + std::size_t(i1)] = {a0, a1, slice_best};
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (int wk = 0; wk < workers; ++wk) {
        res.evaluated += evaluated[std::size_t(wk)];
        if (best_val[std::size_t(wk)] > res.max_value) {
            res.max_value = best_val[std::size_t(wk)];
            res.a0 = best_arg[std::size_t(wk)][0];
            res.a1 = best_arg[std::size_t(wk)][1];
            res.b0 = best_arg[std::size_t(wk)][2];
            res.b1 = best_arg[std::size_t(wk)][3];
        }
    }

    if (opt.refine) {
        double step = opt.grid_step;
        for (int round = 0; round < 2; ++round) {
            const double fine = step / 5;
            double ca0 = res.a0, ca1 = res.a1, cb0 = res.b0, cb1 = res.b1;
            for (double a0 = std::max(0.0, ca0 - step); a0 <= std::min(1.0, ca0 + step) + 1e-12; a0 += fine)
                for (double a1 = std::max(0.0, ca1 - step); a1 <= std::min(1.0, ca1 + step) + 1e-12; a1 += fine)
                    for (double b0 = std::max(0.0, cb0 - step); b0 <= std::min(1.0, cb0 + step) + 1e-12; b0 += fine)
                        for (double b1 = std::max(0.0, cb1 - step); b1 <= std::min(1.0, cb1 + step) + 1e-12;
                             b1 += fine) {
                            double v;
                            if (!figd_value(ctx, a0, a1, b0, b1, v)) continue;
                            if (v > res.max_value) {
                                res.max_value = v;
                                res.a0 = a0;
                                res.a1 = a1;
                                res.b0 = b0;
                                res.b1 = b1;
                            }
                        }
            step = fine;
        }
    }
    return res;
}

// ---------- ZB witness search ----------

namespace {

struct ZbEval {
    double zb_slack = 1e9;
    double egc_slack = 1e9;
};

// target: (0.629, 0.629, 0.11, 0.11, 0)
ZbEval zb_eval(const JointPmf& pmf) {
    // pmf vars: (X, C, A, B); central refinement is X itself (lossless decoder)
    ZbEval out;
    const double R = 0.629, DS = 0.11;
    auto mi = [&](std::vector<std::string> a, std::vector<std::string> b, std::vector<std::string> g) {
        return pmf.mutual_information(a, b, g);
    };
    // optimal side reconstructions from (C, A) and (C, B)
    auto side_distortion = [&](const std::string& u) {
        double d = 0;
        for (int c = 0; c < pmf.alphabet("C"); ++c)
            for (int uu = 0; uu < pmf.alphabet(u); ++uu) {
                double p0 = 0, p1 = 0;
                for (int other = 0; other < pmf.alphabet(u == "A" ? "B" : "A"); ++other) {
                    const int a = u == "A" ? uu : other;
                    const int b = u == "A" ? other : uu;
                    p0 += pmf.prob({0, c, a, b});
                    p1 += pmf.prob({1, c, a, b});
                }
                d += std::min(p0, p1);
            }
        return d;
    };
    const double i1 = mi({"C", "A"}, {"X"}, {});
    const double i2 = mi({"C", "B"}, {"X"}, {});
    const double isum = mi({"C"}, {"X"}, {}) + 1.0 /* I(C,X,A,B;X) = H(X) with U12 = X */ +
                        mi({"A"}, {"B"}, {"C"});
    const double d1 = side_distortion("A");
    const double d2 = side_distortion("B");
    out.zb_slack = std::max({i1 - R, i2 - R, (isum - 2 * R) / 2, d1 - DS, d2 - DS, 0.0});
    // EGC on the same auxiliaries: U1 = (C,A), U2 = (C,B), central U12 = X
    const double e1 = mi({"C", "A"}, {"X"}, {});
    const double e2 = mi({"C", "B"}, {"X"}, {});
    const double esum = mi({"C", "A", "B"}, {"X"}, {}) + mi({"C", "A"}, {"C", "B"}, {}) +
                        (1.0 - mi({"C", "A", "B"}, {"X"}, {}));
    out.egc_slack = std::max({e1 - R, e2 - R, (esum - 2 * R) / 2, d1 - DS, d2 - DS, 0.0});
    return out;
}

JointPmf zb_pmf_from_params(const std::vector<double>& cond) {
    // cond: 2 * 32 nonnegative weights (per x), normalized here
    std::vector<double> p(2 * 2 * 4 * 4, 0.0);
    for (int x = 0; x < 2; ++x) {
        double sum = 0;
        for (int i = 0; i < 32; ++i) sum += cond[std::size_t(x * 32 + i)];
        for (int c = 0; c < 2; ++c)
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    p[std::size_t(((x * 2 + c) * 4 + a) * 4 + b)] =
                        0.5 * cond[std::size_t(x * 32 + c * 16 + a * 4 + b)] / sum;
    }
    return JointPmf({{"X", 2}, {"C", 2}, {"A", 4}, {"B", 4}}, std::move(p));
}

}  // namespace

ZbWitness zb_witness_search(const ExperimentConfig& cfg) {
    Rng rng(cfg.seed);
    // structured initialization: C a coarse common quantization, A/B composed
    // of the common bit and fresh side bits near the target distortion
    auto structured = [&](double flip_c, double flip_s) {
        std::vector<double> cond(64, 1e-6);
        for (int x = 0; x < 2; ++x)
            for (int c = 0; c < 2; ++c)
                for (int a1 = 0; a1 < 2; ++a1)
                    for (int b1 = 0; b1 < 2; ++b1) {
                        const double pc = (c == x) ? 1 - flip_c : flip_c;
                        const double pa = (a1 == x) ? 1 - flip_s : flip_s;
                        const double pb = (b1 == x) ? 1 - flip_s : flip_s;
                        // alphabet 4: (side bit, copy of C)
                        const int a = a1 * 2 + c, b = b1 * 2 + c;
                        cond[std::size_t(x * 32 + c * 16 + a * 4 + b)] += pc * pa * pb;
                    }
        return cond;
    };

    std::vector<double> best_cond = structured(0.35, 0.11);
    double best = zb_eval(zb_pmf_from_params(best_cond)).zb_slack;
    for (double fc : {0.25, 0.35, 0.45})
        for (double fs : {0.09, 0.11, 0.13}) {
            auto cand = structured(fc, fs);
            const double s = zb_eval(zb_pmf_from_params(cand)).zb_slack;
            if (s < best) {
                best = s;
                best_cond = cand;
            }
        }

    // simulated annealing over the conditional weights
    auto cur = best_cond;
    double cur_slack = best;
    const int iters = cfg.trials > 0 ? cfg.trials : 20000;
    double temp = 0.02;
    for (int it = 0; it < iters; ++it) {
        auto cand = cur;
        const int moves = 1 + int(rng.below(3));
        for (int mv = 0; mv < moves; ++mv) {
            const std::size_t i = rng.below(64);
            const double scale = 0.5 + rng.uniform() * 1.5;
            cand[i] = std::max(1e-9, cand[i] * (rng.bernoulli(0.5) ? scale : 1.0 / scale));
        }
        const double s = zb_eval(zb_pmf_from_params(cand)).zb_slack;
        if (s < cur_slack || rng.uniform() < std::exp((cur_slack - s) / temp)) {
            cur = cand;
            cur_slack = s;
            if (s < best) {
                best = s;
                best_cond = cand;
            }
        }
        temp *= 0.9997;
    }

    ZbWitness w;
    w.pmf = zb_pmf_from_params(best_cond);
    auto ev = zb_eval(w.pmf);
    w.zb_slack = ev.zb_slack;
    w.egc_slack = ev.egc_slack;
    w.target.rates = {{1, 0.629}, {2, 0.629}};
    w.target.distortions = {{0b01, 0.11}, {0b10, 0.11}, {0b11, 0.0}};
    return w;
}

}  // namespace mdlab::experiments
