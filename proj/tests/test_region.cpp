#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdlab/info.hpp"
#include "mdlab/region.hpp"
#include "mdlab/rng.hpp"

using namespace mdlab;
using namespace mdlab::region;
using info::JointPmf;
using info::Variable;
using sperner::SpernerFamily;

namespace {

SpernerFamily fam(std::vector<sperner::DecoderSet> sets) {
    std::sort(sets.begin(), sets.end());
    return SpernerFamily{std::move(sets)};
}

JointPmf random_pmf(std::vector<Variable> vars, std::uint64_t seed, double floor = 1e-3) {
    std::size_t cells = 1;
    for (auto& v : vars) cells *= std::size_t(v.alphabet);
    Rng rng(seed);
    std::vector<double> p(cells);
    double sum = 0;
    for (auto& x : p) {
        x = rng.uniform() + floor;
        sum += x;
    }
    for (auto& x : p) x /= sum;
    return JointPmf(std::move(vars), std::move(p));
}

// SSC spec over l=2 with the three non-trivial codebooks
RegionSpec ssc2_spec(const JointPmf& pmf) {
    RegionSpec spec;
    spec.kind = Kind::SSC;
    spec.l = 2;
    spec.pmf = pmf;
    spec.aux = {{fam({0b01}), "A"}, {fam({0b10}), "B"}, {fam({0b01, 0b10}), "C"}};
    return spec;
}

RdVector rd2(double r1, double r2) {
    RdVector v;
    v.rates = {{1, r1}, {2, r2}};
    return v;
}

// brute-force feasibility for systems over few variables: enumerate candidate
// vertices (all n-subsets of tight constraints) within a bounding box
bool vertex_oracle(const BoundSystem& sys, const RdVector& v, double box = 50.0) {
    std::vector<std::vector<double>> rows;  // a.x <= b
    std::vector<double> rhs;
    auto push = [&](const std::vector<double>& a, double b) {
        rows.push_back(a);
        rhs.push_back(b);
    };
    const std::size_t n = sys.vars.size();
    for (const auto& row : sys.rows) {
        double b = row.b;
        for (auto& [i, c] : row.rate_coeff) b += c * v.rates.at(i);
        if (row.rel == lp::Rel::Le || row.rel == lp::Rel::Eq) push(row.a, b);
        if (row.rel == lp::Rel::Ge || row.rel == lp::Rel::Eq) {
            std::vector<double> neg(row.a);
            for (auto& x : neg) x = -x;
            push(neg, -b);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1;
        push(e, box);
        e[i] = -1;
        push(e, box);
    }
    const std::size_t m = rows.size();
    std::vector<std::size_t> pick;
    // iterate all n-subsets of rows, solve tight system by Gaussian elimination
    std::vector<std::size_t> idx(n, 0);
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) -> bool {
        if (depth == n) {
            std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) a[r][c] = rows[idx[r]][c];
                a[r][n] = rhs[idx[r]];
            }
            for (std::size_t c = 0; c < n; ++c) {
                std::size_t piv = c;
                for (std::size_t r = c; r < n; ++r)
                    if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
                if (std::abs(a[piv][c]) < 1e-9) return false;
                std::swap(a[piv], a[c]);
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == c) continue;
                    const double f = a[r][c] / a[c][c];
                    for (std::size_t cc = c; cc <= n; ++cc) a[r][cc] -= f * a[c][cc];
                }
            }
            std::vector<double> x(n);
            for (std::size_t c = 0; c < n; ++c) x[c] = a[c][n] / a[c][c];
            for (std::size_t r = 0; r < m; ++r) {
                double lhs = 0;
                for (std::size_t c = 0; c < n; ++c) lhs += rows[r][c] * x[c];
                if (lhs > rhs[r] + 1e-6) return false;
            }
            return true;
        }
        for (std::size_t r = from; r < m; ++r) {
            idx[depth] = r;
            if (rec(depth + 1, r + 1)) return true;
        }
        return false;
    };
    if (n == 0) {
        for (std::size_t r = 0; r < m; ++r)
            if (0 > rhs[r] + 1e-9) return false;
        return true;
    }
    return rec(0, 0);
}

}  // namespace

TEST_CASE("trivial membership checks") {
    BoundSystem vac;
    vac.l = 2;
    CHECK(check_membership(vac, rd2(0.0, 0.0)).feasible);
    CHECK(check_membership(vac, rd2(3.0, 1.0)).feasible);

    BoundSystem one;
    one.l = 2;
    one.rows.push_back({{}, lp::Rel::Le, -1.5, {{1, 1.0}}, "R1>=H(X)"});
    CHECK(check_membership(one, rd2(1.6, 0.0)).feasible);
    CHECK_FALSE(check_membership(one, rd2(1.4, 0.0)).feasible);
}

TEST_CASE("membership agrees with a vertex-enumeration oracle on random systems") {
    Rng rng(31337);
    for (int it = 0; it < 60; ++it) {
        BoundSystem sys;
        sys.l = 2;
        const std::size_t nv = 1 + rng.below(3);
        for (std::size_t i = 0; i < nv; ++i) sys.vars.push_back("x" + std::to_string(i));
        const int nrows = 2 + int(rng.below(6));
        for (int r = 0; r < nrows; ++r) {
            BoundSystem::Row row;
            row.a.resize(nv);
            for (auto& a : row.a) a = std::floor(rng.uniform() * 5) - 2;
            row.rel = rng.below(2) ? lp::Rel::Le : lp::Rel::Ge;
            row.b = std::floor(rng.uniform() * 9) - 4;
            if (rng.below(3) == 0) row.rate_coeff[1] = 1.0;
            sys.rows.push_back(std::move(row));
        }
        auto v = rd2(rng.uniform() * 3, rng.uniform() * 3);
        CHECK(check_membership(sys, v).feasible == vertex_oracle(sys, v));
    }
}

TEST_CASE("SSC l=2: all-constant auxiliaries leave only trivial constraints") {
    RegionSpec spec;
    spec.kind = Kind::SSC;
    spec.l = 2;
    spec.pmf = random_pmf({{"X", 2}}, 1);
    auto sys = ssc_bounds(spec);
    CHECK(check_membership(sys, rd2(0.0, 0.0)).feasible);
}

TEST_CASE("SSC l=2 projects onto the printed ZB form (constant U_{1,2})") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto pmf = random_pmf({{"X", 2}, {"A", 2}, {"B", 2}, {"C", 2}}, 100 + seed);
        auto sys = ssc_bounds(ssc2_spec(pmf));
        auto proj = project_region(sys);

        const double i1 = pmf.mutual_information({"C", "A"}, {"X"});
        const double i2 = pmf.mutual_information({"C", "B"}, {"X"});
        const double isum = pmf.mutual_information({"C"}, {"X"}) +
                            pmf.mutual_information({"C", "A", "B"}, {"X"}) +
                            pmf.mutual_information({"A"}, {"B"}, {"C"});
        std::vector<lp::Ineq> zb{{{-1, 0}, -i1}, {{0, -1}, -i2}, {{-1, -1}, -isum}};

        for (const auto& row : zb) CHECK(lp::implied_by(row, proj.rate_rows, 1e-6));
        for (const auto& row : proj.rate_rows) CHECK(lp::implied_by(row, zb, 1e-6));
    }
}

TEST_CASE("covering cap: full l=3 family set requires a whitelist") {
    auto S = sperner::enumerate_sperner(3);
    REQUIRE(S.size() == 17);
    // the full system would carry 2^17 - 1 covering subsets
    CHECK((std::uint64_t(1) << 17) - 1 == 131071);

    std::vector<Variable> vars{{"X", 2}};
    for (std::size_t i = 0; i < S.size(); ++i) vars.push_back({"U" + std::to_string(i), 2});
    RegionSpec spec;
    spec.kind = Kind::SSC;
    spec.l = 3;
    spec.pmf = random_pmf(vars, 5, 1e-4);
    for (std::size_t i = 0; i < S.size(); ++i) spec.aux[S[i]] = "U" + std::to_string(i);
    CHECK_THROWS_AS(ssc_bounds(spec), std::invalid_argument);

    std::vector<std::vector<int>> wl;
    for (int i = 0; i < 17; ++i) wl.push_back({i});
    spec.covering_whitelist = wl;
    auto sys = ssc_bounds(spec);
    int cov = 0;
    for (const auto& row : sys.rows) cov += row.tag.rfind("cov:", 0) == 0;
    CHECK(cov == 17);
    CHECK(sys.vars.size() >= 17);
}

TEST_CASE("Stage 1 equals SSC under the rate substitution (Lemma 15 behaviour)") {
    Rng rng(4242);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto pmf = random_pmf({{"X", 2}, {"A", 2}, {"B", 2}, {"C", 2}}, 500 + seed);
        auto spec = ssc2_spec(pmf);
        auto ssc = ssc_bounds(spec);
        spec.kind = Kind::Stage1;
        spec.q = 2;
        auto st1 = nested_coset_bounds(spec);
        for (int t = 0; t < 50; ++t) {
            auto v = rd2(rng.uniform() * 2.2, rng.uniform() * 2.2);
            const bool a = check_membership(ssc, v).feasible;
            const bool b = check_membership(st1, v).feasible;
            CHECK(a == b);
            checked += (a == b);
        }
    }
    CHECK(checked == 20 * 50);
}

TEST_CASE("system generation is deterministic") {
    auto pmf = random_pmf({{"X", 2}, {"A", 2}, {"B", 2}, {"C", 2}}, 9);
    auto s1 = ssc_bounds(ssc2_spec(pmf));
    auto s2 = ssc_bounds(ssc2_spec(pmf));
    REQUIRE(s1.rows.size() == s2.rows.size());
    for (std::size_t i = 0; i < s1.rows.size(); ++i) {
        CHECK(s1.rows[i].a == s2.rows[i].a);
        CHECK(s1.rows[i].b == s2.rows[i].b);
        CHECK(s1.rows[i].tag == s2.rows[i].tag);
    }
}

TEST_CASE("monotonicity: enlarging rates keeps vectors feasible") {
    Rng rng(77);
    auto pmf = random_pmf({{"X", 2}, {"A", 2}, {"B", 2}, {"C", 2}}, 13);
    auto sys = ssc_bounds(ssc2_spec(pmf));
    for (int t = 0; t < 25; ++t) {
        auto v = rd2(rng.uniform() * 2, rng.uniform() * 2);
        if (!check_membership(sys, v).feasible) continue;
        auto w = v;
        w.rates[1] += rng.uniform();
        w.rates[2] += rng.uniform() * 0.5;
        CHECK(check_membership(sys, w).feasible);
    }
}

namespace {

// Example 4 as a Stage-2 spec: source S = (X, Z) on four symbols, V1 = X + N,
// V2 = Z + N', summation decoded at {3}.
RegionSpec example4_spec(double delta) {
    std::vector<double> p(4 * 2 * 2, 0.0);
    auto noise = [&](int b) { return b ? delta : 1 - delta; };
    for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z)
            for (int v1 = 0; v1 < 2; ++v1)
                for (int v2 = 0; v2 < 2; ++v2)
                    p[std::size_t(((x * 2 + z) * 2 + v1) * 2 + v2)] =
                        0.25 * noise(v1 ^ x) * noise(v2 ^ z);
    JointPmf base({{"S", 4}, {"V1", 2}, {"V2", 2}}, std::move(p));
    auto pmf = base.with_function_variable("W", 2, [](const std::vector<int>& a) { return a[1] ^ a[2]; });

    RegionSpec spec;
    spec.kind = Kind::Stage2;
    spec.l = 3;
    spec.q = 2;
    spec.pmf = pmf;
    spec.source_var = "S";
    Summation sum;
    sum.q = 2;
    sum.families = {fam({0b001}), fam({0b010})};
    sum.v_vars = {"V1", "V2"};
    sum.sum_family = fam({0b100});
    spec.summations.push_back(sum);

    auto xof = [](int s) { return s >> 1; };
    auto zof = [](int s) { return s & 1; };
    info::DistortionFn dx, dz, dw, dpair;
    dx.d.assign(4, std::vector<double>(2, 0.0));
    dz.d = dx.d;
    dw.d = dx.d;
    dpair.d.assign(4, std::vector<double>(4, 0.0));
    for (int s = 0; s < 4; ++s) {
        for (int u = 0; u < 2; ++u) {
            dx.d[std::size_t(s)][std::size_t(u)] = xof(s) != u;
            dz.d[std::size_t(s)][std::size_t(u)] = zof(s) != u;
            dw.d[std::size_t(s)][std::size_t(u)] = (xof(s) ^ zof(s)) != u;
        }
        for (int t = 0; t < 4; ++t)
            dpair.d[std::size_t(s)][std::size_t(t)] = (xof(s) != xof(t)) + (zof(s) != zof(t));
    }
    auto table_pair = std::vector<int>{0, 1, 2, 3};          // (v1,v2) -> (v1,v2)
    auto table_v1w = std::vector<int>{0, 1, 3, 2};           // (v1,w) -> (v1, v1^w)
    auto table_v2w = std::vector<int>{0, 2, 3, 1};           // (v2,w) -> (v2^w, v2)
    spec.decoders = {
        {0b001, {{"V1"}, {0, 1}}, dx},
        {0b010, {{"V2"}, {0, 1}}, dz},
        {0b100, {{"W"}, {0, 1}}, dw},
        {0b011, {{"V1", "V2"}, table_pair}, dpair},
        {0b101, {{"V1", "W"}, table_v1w}, dpair},
        {0b110, {{"V2", "W"}, table_v2w}, dpair},
        {0b111, {{"V1", "V2"}, table_pair}, dpair},
    };
    return spec;
}

RdVector rdv3(double delta) {
    RdVector v;
    const double r = 1 - info::binary_entropy(delta);
    v.rates = {{1, r}, {2, r}, {3, r}};
    const double dd = info::binary_convolve(delta, delta);
    v.distortions = {{0b001, delta}, {0b010, delta},      {0b100, dd},       {0b011, 2 * delta},
                     {0b101, 2 * delta}, {0b110, 2 * delta}, {0b111, 2 * delta}};
    return v;
}

}  // namespace

TEST_CASE("Example 4: the Stage-2 system admits the target RD vector") {
    const double delta = 0.1;
    auto spec = example4_spec(delta);
    auto sys = stage2_bounds(spec);

    CHECK(sys.distortion_of.at(0b001) == doctest::Approx(delta).epsilon(1e-12));
    CHECK(sys.distortion_of.at(0b100) == doctest::Approx(info::binary_convolve(delta, delta)).epsilon(1e-12));
    CHECK(sys.distortion_of.at(0b011) == doctest::Approx(2 * delta).epsilon(1e-12));

    auto v = rdv3(delta);
    auto m = check_membership(sys, v);
    CHECK(m.feasible);

    auto bad = v;
    bad.distortions[0b100] -= 0.1;
    CHECK_FALSE(check_membership(sys, bad).feasible);

    // rates strictly below the operating point are rejected too
    auto tight = v;
    tight.rates[3] -= 0.05;
    CHECK_FALSE(check_membership(sys, tight).feasible);
}

TEST_CASE("Stage 2 with q=2 has a single full-support sum constraint") {
    auto spec = example4_spec(0.1);
    auto sys = stage2_bounds(spec);
    std::set<std::string> full_support_w;
    for (const auto& row : sys.rows) {
        if (row.tag.rfind("cov:", 0) != 0) continue;
        auto pos = row.tag.find("W#0(11)");
        if (pos != std::string::npos) full_support_w.insert("W#0(11)");
    }
    CHECK(full_support_w.size() == 1);
}

TEST_CASE("Stage 2 with r_i pinned to zero matches Stage 1 over the V auxiliaries") {
    auto spec = example4_spec(0.08);
    auto sys2 = stage2_bounds(spec);
    // pin the shared-row rate to zero
    auto pinned = sys2;
    for (std::size_t i = 0; i < pinned.vars.size(); ++i) {
        if (pinned.vars[i].rfind("ri", 0) == 0) {
            BoundSystem::Row row;
            row.a.assign(pinned.vars.size(), 0.0);
            row.a[i] = 1.0;
            row.rel = lp::Rel::Le;
            row.b = 0.0;
            row.tag = "pin";
            pinned.rows.push_back(row);
        }
    }

    RegionSpec st1;
    st1.kind = Kind::Stage1;
    st1.l = 3;
    st1.q = 2;
    st1.pmf = spec.pmf;
    st1.source_var = "S";
    st1.aux = {{fam({0b001}), "V1"}, {fam({0b010}), "V2"}};
    st1.decoders = spec.decoders;
    // drop decoders whose reconstruction uses W: the Stage-1 scheme cannot
    // decode the sum, so compare on the rate geometry alone
    auto sys1 = nested_coset_bounds(st1);

    Rng rng(71);
    for (int t = 0; t < 60; ++t) {
        RdVector v;
        v.rates = {{1, rng.uniform() * 1.6}, {2, rng.uniform() * 1.6}, {3, rng.uniform() * 1.6}};
        // Stage-2 includes description 3's bins of the sum codebook; at r_i=0
        // the sum code is as expensive as sending both V's, so the projected
        // regions agree only on the V-side. For the equality check we ask for
        // R3 large enough that the W layer is never binding.
        v.rates[3] += 2.5;
        const bool a = check_membership(pinned, v).feasible;
        const bool b = check_membership(sys1, v).feasible;
        CHECK(a == b);
    }
}

TEST_CASE("Stage 3 with m=2 generates the Stage-2 system; Stage 4 with s=1 the Stage-3 one") {
    auto spec = example4_spec(0.1);
    auto s2 = stage2_bounds(spec);
    auto spec3 = spec;
    spec3.kind = Kind::Stage3;
    auto s3 = stage3_bounds(spec3);
    REQUIRE(s2.rows.size() == s3.rows.size());
    REQUIRE(s2.vars == s3.vars);
    for (std::size_t i = 0; i < s2.rows.size(); ++i) {
        CHECK(s2.rows[i].a == s3.rows[i].a);
        CHECK(s2.rows[i].b == doctest::Approx(s3.rows[i].b).epsilon(1e-15));
    }
    auto spec4 = spec;
    spec4.kind = Kind::Stage4;
    auto s4 = stage4_bounds(spec4);
    REQUIRE(s3.rows.size() == s4.rows.size());
    REQUIRE(s3.vars == s4.vars);
}

TEST_CASE("Stage 3 with m=3, q=2 exposes seven W variants") {
    // three summands decoded at {1},{2},{3}; the sum at {1,2,3}... use l=3 and
    // sum family {2,3} to keep it a valid Sperner family distinct from the others
    std::vector<double> p(2 * 2 * 2 * 2, 1.0 / 16);
    JointPmf pmf({{"X", 2}, {"V1", 2}, {"V2", 2}, {"V3", 2}}, std::move(p));
    RegionSpec spec;
    spec.kind = Kind::Stage3;
    spec.l = 3;
    spec.q = 2;
    spec.pmf = pmf;
    Summation sum;
    sum.q = 2;
    sum.families = {fam({0b001}), fam({0b010}), fam({0b100})};
    sum.v_vars = {"V1", "V2", "V3"};
    sum.sum_family = fam({0b110, 0b101});
    spec.summations.push_back(sum);
    auto sys = stage3_bounds(spec);
    std::set<std::string> w_variants;
    for (const auto& row : sys.rows) {
        std::size_t pos = 0;
        while ((pos = row.tag.find("W#0(", pos)) != std::string::npos) {
            auto end = row.tag.find(')', pos);
            REQUIRE(end != std::string::npos);
            w_variants.insert(row.tag.substr(pos, end - pos + 1));
            pos = end;
        }
    }
    CHECK(w_variants.size() == 7);
}

TEST_CASE("EGC and ZB degenerate cases") {
    // constant side auxiliaries: only the central refinement constrains rates
    auto pmf = random_pmf({{"X", 2}, {"R", 3}}, 21);
    RegionSpec spec;
    spec.kind = Kind::EGC;
    spec.l = 2;
    spec.pmf = pmf;
    spec.aux = {{fam({0b11}), "R"}};
    auto sys = egc_bounds(spec);
    const double i12 = pmf.mutual_information({"R"}, {"X"});
    CHECK(check_membership(sys, rd2(i12 / 2 + 0.01, i12 / 2 + 0.01)).feasible);
    CHECK_FALSE(check_membership(sys, rd2(i12 / 2 - 0.01, i12 / 2 - 0.01)).feasible);
    CHECK(check_membership(sys, rd2(0.0, i12 + 0.01)).feasible);

    // independent U1, U2 and constant common part: EGC and ZB sum bounds agree
    std::vector<double> q(8);
    Rng rng(5);
    for (int u1 = 0; u1 < 2; ++u1)
        for (int u2 = 0; u2 < 2; ++u2)
            for (int x = 0; x < 2; ++x)
                q[std::size_t(u1 * 4 + u2 * 2 + x)] =
                    (u1 ? 0.3 : 0.7) * (u2 ? 0.6 : 0.4) * (x == (u1 ^ u2) ? 0.8 : 0.2);
    JointPmf ind({{"U1", 2}, {"U2", 2}, {"X", 2}}, std::move(q));
    RegionSpec egc;
    egc.kind = Kind::EGC;
    egc.l = 2;
    egc.pmf = ind;
    egc.aux = {{fam({0b01}), "U1"}, {fam({0b10}), "U2"}};
    RegionSpec zb = egc;
    zb.kind = Kind::ZB;
    auto se = egc_bounds(egc);
    auto sz = zb_bounds(zb);
    // sum-rate rows carry the same constant
    double be = 0, bz = 0;
    for (auto& row : se.rows)
        if (row.tag == "egc:sum") be = row.b;
    for (auto& row : sz.rows)
        if (row.tag == "zb:sum") bz = row.b;
    CHECK(be == doctest::Approx(bz).epsilon(1e-12));

    RegionSpec bad = egc;
    bad.l = 3;
    CHECK_THROWS_AS(egc_bounds(bad), std::invalid_argument);
}

TEST_CASE("projection identities") {
    // a system whose internal variable is absent from all rows projects to itself
    BoundSystem sys;
    sys.l = 2;
    sys.vars = {"unused"};
    BoundSystem::Row row;
    row.a = {0.0};
    row.rel = lp::Rel::Le;
    row.b = -0.7;
    row.rate_coeff = {{1, 1.0}};
    row.tag = "R1 >= 0.7";
    sys.rows.push_back(row);
    auto proj = project_region(sys);
    REQUIRE(proj.rate_rows.size() == 1);
    CHECK(proj.rate_rows[0].a[0] == doctest::Approx(-1.0));
    CHECK(proj.rate_rows[0].b == doctest::Approx(-0.7));

    BoundSystem big;
    big.l = 2;
    for (int i = 0; i < 60; ++i) big.vars.push_back("v" + std::to_string(i));
    CHECK_THROWS_AS(project_region(big), std::invalid_argument);
}

namespace {

// random conditional P(aux | x) glued to a fixed source marginal: the MD
// problem fixes P_X, so time-sharing mixes only the auxiliary channels
JointPmf random_aux_channel(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> p(16);
    for (int x = 0; x < 2; ++x) {
        double sum = 0;
        std::vector<double> cond(8);
        for (auto& c : cond) {
            c = rng.uniform() + 1e-3;
            sum += c;
        }
        for (int j = 0; j < 8; ++j) p[std::size_t(x * 8 + j)] = 0.5 * cond[std::size_t(j)] / sum;
    }
    return JointPmf({{"X", 2}, {"A", 2}, {"B", 2}, {"C", 2}}, std::move(p));
}

RegionSpec ssc2_spec_with_decoder(const JointPmf& pmf) {
    auto spec = ssc2_spec(pmf);
    // decoder {1} reconstructs from (C, A) with the per-symbol optimal rule
    ReconstructionMap g;
    g.inputs = {"C", "A"};
    g.table.resize(4);
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a) {
            double p0 = 0, p1 = 0;
            for (int b = 0; b < 2; ++b) {
                p0 += pmf.prob({0, a, b, c});
                p1 += pmf.prob({1, a, b, c});
            }
            g.table[std::size_t(c * 2 + a)] = p1 > p0 ? 1 : 0;
        }
    spec.decoders = {{0b01, g, info::hamming_distortion(2)}};
    return spec;
}

}  // namespace

TEST_CASE("convexity probe: time-sharing extension covers convex combinations") {
    // The extension of the convexity lemma: the designated full-singleton
    // variable C is replaced by (C, j) with the mixture flag j. Distortion
    // floors must mix exactly; the rate side is tested with an interior
    // margin, since the single-letter extension witness carries an h_b(lambda)
    // slack term on unconditioned packing rows.
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto p0 = random_aux_channel(900 + seed);
        auto p1 = random_aux_channel(950 + seed);
        auto sp0 = ssc2_spec_with_decoder(p0);
        auto sp1 = ssc2_spec_with_decoder(p1);
        auto s0 = ssc_bounds(sp0);
        auto s1 = ssc_bounds(sp1);

        const double margin = 1.0;
        auto feas_point = [&](const JointPmf& p, const BoundSystem& s) {
            const double r1 = p.mutual_information({"C", "A"}, {"X"});
            const double r2 = p.mutual_information({"C", "B"}, {"X"});
            const double sum = p.mutual_information({"C"}, {"X"}) +
                               p.mutual_information({"C", "A", "B"}, {"X"}) +
                               p.mutual_information({"A"}, {"B"}, {"C"});
            double a = std::max(r1, sum - r2) + margin;
            auto v = rd2(a, std::max(r2, sum - a) + margin);
            v.distortions[0b01] = s.distortion_of.at(0b01);
            return v;
        };
        auto v0 = feas_point(p0, s0), v1 = feas_point(p1, s1);
        REQUIRE(check_membership(s0, v0).feasible);
        REQUIRE(check_membership(s1, v1).feasible);

        for (double lambda : {0.25, 0.5, 0.75}) {
            std::vector<double> mix(2 * 2 * 2 * 4, 0.0);
            for (int x = 0; x < 2; ++x)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c) {
                            const auto base = std::size_t(((x * 2 + a) * 2 + b) * 4);
                            mix[base + std::size_t(c * 2 + 0)] = lambda * p0.prob({x, a, b, c});
                            mix[base + std::size_t(c * 2 + 1)] = (1 - lambda) * p1.prob({x, a, b, c});
                        }
            JointPmf pm({{"X", 2}, {"A", 2}, {"B", 2}, {"C", 4}}, std::move(mix));
            auto spec = ssc2_spec(pm);
            // the extended reconstruction applies g0 on the j=0 half, g1 on j=1
            ReconstructionMap g;
            g.inputs = {"C", "A"};
            g.table.resize(8);
            for (int cj = 0; cj < 4; ++cj)
                for (int a = 0; a < 2; ++a) {
                    const int c = cj >> 1, j = cj & 1;
                    const auto& src = j == 0 ? sp0.decoders[0].recon : sp1.decoders[0].recon;
                    g.table[std::size_t(cj * 2 + a)] = src.table[std::size_t(c * 2 + a)];
                }
            spec.decoders = {{0b01, g, info::hamming_distortion(2)}};
            auto sm = ssc_bounds(spec);

            // distortion floors mix exactly
            CHECK(sm.distortion_of.at(0b01) ==
                  doctest::Approx(lambda * s0.distortion_of.at(0b01) + (1 - lambda) * s1.distortion_of.at(0b01))
                      .epsilon(1e-10));

            auto v = rd2(lambda * v0.rates[1] + (1 - lambda) * v1.rates[1],
                         lambda * v0.rates[2] + (1 - lambda) * v1.rates[2]);
            v.distortions[0b01] = sm.distortion_of.at(0b01);
            CHECK(check_membership(sm, v).feasible);
        }
    }
}
