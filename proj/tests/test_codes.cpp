#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "mdlab/codes.hpp"
#include "mdlab/info.hpp"

using namespace mdlab;
using namespace mdlab::codes;
using gf::FieldMatrix;
using gf::FieldVector;

namespace {

FieldVector fv(std::vector<std::uint8_t> v, std::uint32_t q = 2) { return FieldVector(std::move(v), q); }

// independent exhaustive quantizer: naive multiply per message, lex tie-break
QuantizationResult oracle_quantize(const CosetCode& code, const FieldVector& x) {
    const std::uint32_t q = code.q();
    std::size_t count = 1;
    for (std::size_t i = 0; i < code.k(); ++i) count *= q;
    std::size_t best_d = SIZE_MAX;
    FieldVector best_msg, best_cw;
    for (std::size_t idx = 0; idx < count; ++idx) {
        FieldVector msg(code.k(), q);
        std::size_t t = idx;
        for (std::size_t d = code.k(); d-- > 0;) {
            msg.set(d, std::uint32_t(t % q));
            t /= q;
        }
        auto cw = code.encode(msg);
        const std::size_t dist = gf::hamming_distance(cw, x);
        if (dist < best_d) {
            best_d = dist;
            best_msg = msg;
            best_cw = cw;
        }
    }
    return {best_msg, best_cw, double(best_d) / double(code.n())};
}

bool in_row_space(const FieldMatrix& g, const FieldVector& v) {
    FieldMatrix aug(g.rows() + 1, g.cols(), g.modulus());
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) aug.set(r, c, g.at(r, c));
    for (std::size_t c = 0; c < g.cols(); ++c) aug.set(g.rows(), c, v[c]);
    return gf::rank(aug) == gf::rank(g);
}

std::set<std::vector<std::uint8_t>> codebook_set(const CosetCode& c) {
    std::set<std::vector<std::uint8_t>> out;
    for (const auto& cw : enumerate_codebook(c)) out.insert({cw.raw().begin(), cw.raw().end()});
    return out;
}

}  // namespace

TEST_CASE("build_coset_code shapes and sizes") {
    // k = n with identity generator and zero dither: the full space
    auto full = linear_code(FieldMatrix::identity(4, 2));
    CHECK(codebook_set(full).size() == 16);

    // k = 0: a single codeword {b}
    auto single = build_coset_code(2, 6, 0, 3);
    auto cws = enumerate_codebook(single);
    REQUIRE(cws.size() == 1);
    CHECK(cws[0] == single.dither());

    // codebook size q^rank(G)
    auto c = build_coset_code(2, 8, 4, 17);
    CHECK(codebook_set(c).size() == (std::size_t(1) << gf::rank(c.generator())));
    CHECK(build_coset_code(2, 8, 4, 17).generator() == c.generator());  // determinism
    CHECK_THROWS_AS(build_coset_code(2, 4, 5, 0), std::invalid_argument);
}

TEST_CASE("quantize_min_hamming: codewords, ties, brute-force oracle") {
    auto c = build_coset_code(2, 10, 5, 5);
    auto some = c.encode(fv({1, 0, 1, 1, 0}));
    auto r = quantize_min_hamming(c, some);
    CHECK(r.distortion == 0.0);
    CHECK(r.codeword == some);

    // F2 repetition code {00, 11}: x = 01 ties, lexicographically smaller message wins
    FieldMatrix rep(1, 2, 2);
    rep.set(0, 0, 1);
    rep.set(0, 1, 1);
    auto repc = linear_code(rep);
    auto t = quantize_min_hamming(repc, fv({0, 1}));
    CHECK(t.message == fv({0}));
    CHECK(t.codeword == fv({0, 0}));

    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto code = build_coset_code(2, 10, 5, seed);
        auto x = gf::random_vector(10, 2, seed ^ 0x5555);
        auto got = quantize_min_hamming(code, x);
        auto want = oracle_quantize(code, x);
        CHECK(got.distortion == want.distortion);
        CHECK(got.message == want.message);
        CHECK(got.codeword == want.codeword);
    }
}

TEST_CASE("trellis path agrees with exhaustive search") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        // dense small code: the trellis is exact on any generator
        auto code = build_coset_code(2, 12, 6, seed);
        auto x = gf::random_vector(12, 2, seed ^ 0x77);
        std::vector<double> costs(12 * 2, 1.0);
        for (std::size_t j = 0; j < 12; ++j) costs[j * 2 + x[j]] = 0.0;
        auto via_trellis = quantize_min_cost(code, costs, x);
        auto via_exhaustive = oracle_quantize(code, x);
        CHECK(via_trellis.distortion == via_exhaustive.distortion);
    }
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto code = build_banded_code(3, 20, 8, 6, seed);
        auto x = gf::random_vector(20, 3, seed ^ 0x12);
        std::vector<double> costs(20 * 3, 1.0);
        for (std::size_t j = 0; j < 20; ++j) costs[j * 3 + x[j]] = 0.0;
        auto via_trellis = quantize_min_cost(code, costs, x);
        auto via_exhaustive = oracle_quantize(code, x);
        CHECK(via_trellis.distortion == via_exhaustive.distortion);
    }
}

TEST_CASE("large banded codes quantize via the trellis automatically") {
    auto code = build_banded_code(2, 256, 149, 20, 9);  // not enumerable
    CHECK_FALSE(code.enumerable());
    auto x = gf::random_vector(256, 2, 42);
    auto r = quantize_min_hamming(code, x);
    CHECK(r.distortion <= 0.2);  // rate 0.58 quantizer should do much better than random (0.5)
    CHECK(gf::hamming_distance(r.codeword, x) == std::size_t(r.distortion * 256 + 0.5));
    // the returned message re-encodes to the codeword under the span-form basis
    if (r.message.size() > 0) {
        auto& t = code.trellis();
        CHECK(gf::vec_add(gf::mat_vec_mul(t.span_form, r.message), code.dither()) == r.codeword);
    }
}

TEST_CASE("quantize_typical") {
    // vacuous level: the first codeword in canonical order comes back
    auto code = build_coset_code(2, 8, 3, 11);
    info::JointPmf uni({{"X", 2}, {"U", 2}}, {0.25, 0.25, 0.25, 0.25});
    auto x = gf::random_vector(8, 2, 1);
    auto r = quantize_typical(code, x, uni, 10.0);
    REQUIRE(r.has_value());
    CHECK(r->message == FieldVector(3, 2));
    CHECK(r->codeword == code.encode(FieldVector(3, 2)));

    // U = X deterministic, full-space code: returns x itself
    info::JointPmf diag({{"X", 2}, {"U", 2}}, {0.5, 0.0, 0.0, 0.5});
    auto full = linear_code(FieldMatrix::identity(8, 2));
    auto bal = fv({0, 1, 0, 1, 0, 1, 0, 1});
    auto rx = quantize_typical(full, bal, diag, 0.3);
    REQUIRE(rx.has_value());
    CHECK(rx->codeword == bal);

    // impossible target -> NotFound as a value
    info::JointPmf anti({{"X", 2}, {"U", 2}}, {0.0, 0.5, 0.5, 0.0});
    auto r2 = quantize_typical(linear_code(FieldMatrix(1, 8, 2)), bal, anti, 0.05);
    CHECK_FALSE(r2.has_value());
}

TEST_CASE("coset_bin basics and the additivity identity") {
    FieldMatrix rep3(1, 3, 2);
    for (int j = 0; j < 3; ++j) rep3.set(0, std::size_t(j), 1);
    auto inner = linear_code(rep3);
    CHECK(coset_bin(inner, fv({1, 1, 1})) == fv({0, 0, 0}));
    CHECK(coset_bin(inner, fv({1, 0, 1})) == fv({0, 1, 0}));  // single error below half min distance

    auto code = build_coset_code(2, 12, 5, 23);
    Rng rng(99);
    for (int it = 0; it < 1000; ++it) {
        auto x = gf::random_vector(12, 2, rng.next());
        auto z = gf::random_vector(12, 2, rng.next());
        auto lhs = gf::vec_sub(gf::vec_add(coset_bin(code, x), coset_bin(code, z)), gf::vec_add(x, z));
        CHECK(in_row_space(code.generator(), lhs));
    }
}

TEST_CASE("quantization noise is invariant under codeword translation (unique minimizer)") {
    auto g = build_coset_code(2, 10, 4, 3);
    auto lin = linear_code(g.generator());
    auto cws = enumerate_codebook(lin);
    Rng rng(5);
    int tested = 0;
    while (tested < 200) {
        auto x = gf::random_vector(10, 2, rng.next());
        // unique minimizer?
        std::size_t best = SIZE_MAX;
        int count = 0;
        for (const auto& cw : cws) {
            auto d = gf::hamming_distance(cw, x);
            if (d < best) {
                best = d;
                count = 1;
            } else if (d == best) {
                ++count;
            }
        }
        if (count != 1) continue;
        ++tested;
        auto noise = gf::vec_sub(x, quantize_min_hamming(lin, x).codeword);
        const auto& c = cws[rng.below(cws.size())];
        auto noise2 = gf::vec_sub(gf::vec_add(x, c), quantize_min_hamming(lin, gf::vec_add(x, c)).codeword);
        CHECK(noise == noise2);
    }
}

TEST_CASE("nearest_codeword") {
    FieldMatrix rep3(1, 3, 2);
    for (int j = 0; j < 3; ++j) rep3.set(0, std::size_t(j), 1);
    auto inner = linear_code(rep3);
    CHECK(nearest_codeword(inner, fv({1, 1, 1})) == fv({1, 1, 1}));
    CHECK(nearest_codeword(inner, fv({1, 0, 1})) == fv({1, 1, 1}));
    CHECK(nearest_codeword(inner, fv({0, 0, 1})) == fv({0, 0, 0}));
}

TEST_CASE("channel decoding: banded code corrects BSC noise at low rate") {
    auto code = build_banded_code(2, 256, 64, 40, 7);  // rate 0.25 << 1 - h(0.05)
    Rng rng(123);
    int errors = 0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
        FieldVector msg(64, 2);
        for (std::size_t i = 0; i < 64; ++i) msg.set(i, std::uint32_t(rng.below(2)));
        auto cw = code.encode(msg);
        auto noisy = cw;
        FieldVector y(256, 2);
        for (std::size_t i = 0; i < 256; ++i) y.set(i, (noisy[i] + (rng.uniform() < 0.05 ? 1 : 0)) % 2);
        errors += (nearest_codeword(code, y) == cw) ? 0 : 1;
    }
    CHECK(double(errors) / trials <= 0.05);
}

TEST_CASE("build_nested_pair nesting and rank bookkeeping") {
    auto pair = build_nested_pair(2, 10, 3, 6, 21);
    auto outer_set = codebook_set(pair.outer);
    for (const auto& cw : enumerate_codebook(pair.inner)) {
        CHECK(outer_set.count({cw.raw().begin(), cw.raw().end()}) == 1);
    }
    const auto ri = gf::rank(pair.inner.generator());
    const auto ro = gf::rank(pair.outer.generator());
    CHECK(codebook_set(pair.inner).size() == (std::size_t(1) << ri));
    CHECK(outer_set.size() == (std::size_t(1) << ro));
    if (ri == 3 && ro == 6)
        CHECK(outer_set.size() / codebook_set(pair.inner).size() == (std::size_t(1) << 3));

    auto degenerate = build_nested_pair(2, 8, 0, 3, 2);
    CHECK(enumerate_codebook(degenerate.inner).size() == 1);
    CHECK_THROWS_AS(build_nested_pair(2, 8, 4, 4, 0), std::invalid_argument);
}

TEST_CASE("shared-inner pair extremes") {
    // l = l' = 0: identical codebooks up to the dither shift
    auto same = build_shared_inner_pair(2, 8, 3, 0, 0, 31);
    CHECK(same.c1.generator() == same.c2.generator());
    auto s1 = codebook_set(linear_code(same.c1.generator()));

    // k = 0: codebooks generated independently
    auto indep = build_shared_inner_pair(2, 10, 0, 4, 4, 33);
    CHECK_FALSE(indep.c1.generator() == indep.c2.generator());
    CHECK(indep.shared_k == 0);
    (void)s1;
}

TEST_CASE("sum-code rank is generically k + l + l'") {
    int full_rank = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto pair = build_shared_inner_pair(2, 24, 4, 3, 2, seed);
        auto sc = sum_code(pair, 1, 1);
        CHECK(sc.k() == 9);
        full_rank += gf::rank(sc.generator()) == 9;
    }
    CHECK(full_rank == 100);
}

TEST_CASE("sum_code membership and closure") {
    // same linear code, zero dithers: closed under addition, sum code is the code itself
    auto g = gf::random_matrix(4, 9, 2, 77);
    SharedInnerPair same;
    same.shared_k = 4;
    same.c1 = linear_code(g);
    same.c2 = linear_code(g);
    auto sc = sum_code(same, 1, 1);
    CHECK(codebook_set(sc) == codebook_set(same.c1));

    auto pair = build_shared_inner_pair(3, 12, 2, 2, 3, 5);
    auto s = sum_code(pair, 2, 1);
    Rng rng(8);
    for (int it = 0; it < 500; ++it) {
        FieldVector u(pair.c1.k(), 3), v(pair.c2.k(), 3);
        for (std::size_t i = 0; i < u.size(); ++i) u.set(i, std::uint32_t(rng.below(3)));
        for (std::size_t i = 0; i < v.size(); ++i) v.set(i, std::uint32_t(rng.below(3)));
        auto w = gf::vec_add(gf::scalar_mul(2, pair.c1.encode(u)), gf::scalar_mul(1, pair.c2.encode(v)));
        // w - dither(s) must lie in the sum code's row space
        CHECK(in_row_space(s.generator(), gf::vec_sub(w, s.dither())));
    }
    CHECK_THROWS_AS(sum_code(pair, 0, 1), std::invalid_argument);
}

TEST_CASE("ensemble construction: m=2 consistency, independence, exact intersections") {
    // m = 2 with a shared block: intersection rows match the lattice
    std::map<std::uint32_t, double> rates{{0b01, 0.5}, {0b10, 0.5}, {0b11, 0.25}};
    auto ens = build_ensemble(2, 8, 2, rates, 3);
    REQUIRE(ens.codes.size() == 2);
    CHECK(ens.intersection_rows(0b11) == 2);  // 0.25 * 8
    CHECK(ens.codes[0].k() == 4);
    CHECK(ens.codes[1].k() == 4);

    // all higher-order rates zero: mutually independent codes
    std::map<std::uint32_t, double> ind{{0b01, 0.25}, {0b10, 0.25}, {0b100, 0.25}};
    auto free3 = build_ensemble(2, 8, 3, ind, 4);
    CHECK(free3.rows_exactly.size() == 3);

    // m = 3 nontrivial lattice at n = 9: check intersections by enumeration
    std::map<std::uint32_t, double> lat{{0b001, 4.0 / 9}, {0b010, 4.0 / 9}, {0b100, 4.0 / 9},
                                        {0b011, 2.0 / 9}, {0b101, 1.0 / 9}, {0b110, 1.0 / 9},
                                        {0b111, 1.0 / 9}};
    auto e3 = build_ensemble(2, 9, 3, lat, 11);
    auto s0 = codebook_set(linear_code(e3.codes[0].generator()));
    auto s1 = codebook_set(linear_code(e3.codes[1].generator()));
    auto s2 = codebook_set(linear_code(e3.codes[2].generator()));
    auto inter = [](const std::set<std::vector<std::uint8_t>>& a, const std::set<std::vector<std::uint8_t>>& b) {
        std::set<std::vector<std::uint8_t>> out;
        for (const auto& x : a)
            if (b.count(x)) out.insert(x);
        return out;
    };
    CHECK(inter(s0, s1).size() == (std::size_t(1) << e3.intersection_rows(0b011)));
    CHECK(inter(s0, s2).size() == (std::size_t(1) << e3.intersection_rows(0b101)));
    CHECK(inter(inter(s0, s1), s2).size() == (std::size_t(1) << e3.intersection_rows(0b111)));

    // infeasible lattice rejected
    std::map<std::uint32_t, double> bad{{0b01, 0.25}, {0b10, 0.25}, {0b11, 0.5}};
    CHECK_THROWS_AS(build_ensemble(2, 8, 2, bad, 1), std::invalid_argument);
}

TEST_CASE("distsum: same-code quantization noises convolve (quick version)") {
    const double delta = 0.1;
    const double rate = 1 - info::binary_entropy(delta) + 0.05;
    const std::size_t n = 256;
    auto code = build_banded_code(2, n, std::size_t(rate * n + 0.5), 22, 77);
    Rng rng(2024);
    double d1 = 0, d2 = 0, d3 = 0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
        auto x = gf::random_vector(n, 2, rng.next());
        auto z = gf::random_vector(n, 2, rng.next());
        auto xq = quantize_min_hamming(code, x).codeword;
        auto zq = quantize_min_hamming(code, z).codeword;
        d1 += double(gf::hamming_distance(x, xq)) / n;
        d2 += double(gf::hamming_distance(z, zq)) / n;
        d3 += double(gf::hamming_distance(gf::vec_add(xq, zq), gf::vec_add(x, z))) / n;
    }
    d1 /= trials;
    d2 /= trials;
    d3 /= trials;
    CHECK(d1 <= 0.13);
    CHECK(std::abs(d3 - info::binary_convolve(d1, d2)) <= 0.03);
}
