#include "mdlab/region.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace mdlab::region {

namespace {

using sperner::decoder_to_string;
using sperner::family_to_string;

constexpr std::size_t kMaxRows = 200000;

// One decodable element of a stage's codebook collection: an unstructured
// U-codebook, a structured V-codebook, or a linear-combination W-codebook.
struct Element {
    std::string var;                                // PMF variable
    SpernerFamily fam;                              // where it is decoded
    std::vector<std::pair<std::size_t, double>> rate;  // codebook rate as sum coeff*internal_var
    std::map<int, std::size_t> rho;                 // description -> bin-rate variable
    double cover_const = 0;   // H(U) for SSC, log2 q for the coset stages
    std::string tag;
};

struct Builder {
    const RegionSpec& spec;
    info::JointPmf pmf;  // spec.pmf extended with W function variables
    BoundSystem sys;
    std::vector<Element> elements;  // U's first, then V's, then W's (decodable ones)

    explicit Builder(const RegionSpec& s) : spec(s), pmf(s.pmf) { sys.l = s.l; }

    std::size_t add_var(const std::string& name) {
        sys.vars.push_back(name);
        return sys.vars.size() - 1;
    }

    void add_row(std::vector<std::pair<std::size_t, double>> terms, lp::Rel rel, double b,
                 std::map<int, double> rc, std::string tag) {
        if (sys.rows.size() >= kMaxRows) throw std::runtime_error("bound system row cap exceeded");
        BoundSystem::Row row;
        row.a.assign(sys.vars.size(), 0.0);
        for (auto& [i, c] : terms) row.a[i] += c;
        row.rel = rel;
        row.b = b;
        row.rate_coeff = std::move(rc);
        row.tag = std::move(tag);
        sys.rows.push_back(std::move(row));
    }

    double entropy(const std::vector<std::string>& names, bool given_x) const {
        if (names.empty()) return 0.0;
        if (!given_x) return pmf.entropy(names);
        return pmf.conditional_entropy(names, {spec.source_var});
    }
};

std::vector<std::pair<SpernerFamily, std::string>> active_families(const RegionSpec& spec) {
    std::vector<std::pair<SpernerFamily, std::string>> out(spec.aux.begin(), spec.aux.end());
    const DecoderSet full = (1u << spec.l) - 1;
    for (auto& [fam, var] : out) {
        if (!sperner::is_sperner(fam) || fam.sets.empty())
            throw std::invalid_argument("auxiliary index " + family_to_string(fam) + " is not a Sperner family");
        for (auto s : fam.sets)
            if (s == 0 || (s & ~full) != 0)
                throw std::invalid_argument("family member outside the description set");
        (void)var;
    }
    return out;
}

bool family_decoded_at(const SpernerFamily& fam, DecoderSet N) {
    for (auto s : fam.sets)
        if ((s & N) == s) return true;
    return false;
}

bool family_decoded_strictly_below(const SpernerFamily& fam, DecoderSet N) {
    for (DecoderSet sub = (N - 1) & N; sub != 0; sub = (sub - 1) & N)
        if (family_decoded_at(fam, sub)) return true;
    return false;
}

// Generates the covering and packing skeleton shared by every stage.
void generate_core(Builder& b, bool coset_constants) {
    const RegionSpec& spec = b.spec;
    auto& elements = b.elements;

    // ---- covering rows ----
    // group 1: subsets of U and V elements together; group 2: subsets of U and
    // W elements. Elements are indexed into `elements`; U's and V's are
    // cover-group 1, W's cover-group 2.
    std::vector<std::size_t> uv_idx, w_idx, u_idx;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (elements[i].tag[0] == 'W')
            w_idx.push_back(i);
        else {
            uv_idx.push_back(i);
            if (elements[i].tag[0] == 'U') u_idx.push_back(i);
        }
    }

    auto covering_row = [&](const std::vector<std::size_t>& group) {
        if (group.empty()) return;
        std::vector<std::string> names;
        std::vector<std::pair<std::size_t, double>> terms;
        double consts = 0;
        std::string tag = "cov:";
        for (auto i : group) {
            names.push_back(elements[i].var);
            consts += elements[i].cover_const;
            for (auto& [v, c] : elements[i].rate) terms.emplace_back(v, c);
            tag += elements[i].tag + ";";
        }
        // H(group | X) >= sum (const - rate)  <=>  sum rate >= sum const - H(.|X)
        const double h = b.entropy(names, true);
        b.add_row(std::move(terms), lp::Rel::Ge, consts - h, {}, std::move(tag));
    };

    if (!spec.covering_whitelist) {
        if (uv_idx.size() > std::size_t(kMaxActiveFamilies))
            throw std::invalid_argument(
                "active family count exceeds the covering cap (" + std::to_string(kMaxActiveFamilies) +
                "); supply a covering whitelist");
        for (std::uint64_t mask = 1; mask < (1ull << uv_idx.size()); ++mask) {
            std::vector<std::size_t> group;
            for (std::size_t i = 0; i < uv_idx.size(); ++i)
                if (mask >> i & 1) group.push_back(uv_idx[i]);
            covering_row(group);
        }
    } else {
        for (const auto& subset : *spec.covering_whitelist) {
            std::vector<std::size_t> group;
            for (int i : subset) group.push_back(uv_idx.at(std::size_t(i)));
            covering_row(group);
        }
    }
    // W covering rows: one linear-combination codebook at a time, joined with
    // every subset of the independently drawn U codebooks. Joint subsets of
    // several W variants would overcount; the variants are all determined by
    // one codeword tuple, so only the per-variant point-to-point bound holds.
    if (!w_idx.empty()) {
        if (u_idx.size() > 14) throw std::invalid_argument("covering row blowup: too many U elements");
        for (auto wi : w_idx) {
            for (std::uint64_t um = 0; um < (1ull << u_idx.size()); ++um) {
                std::vector<std::size_t> group;
                for (std::size_t i = 0; i < u_idx.size(); ++i)
                    if (um >> i & 1) group.push_back(u_idx[i]);
                group.push_back(wi);
                covering_row(group);
            }
        }
    }

    // ---- per-codebook rate ceilings ----
    for (auto& e : elements) {
        if (e.tag[0] == 'W') continue;  // derived rate, no own ceiling
        // rate <= H(U) (SSC) or log2 q (coset stages)
        b.add_row({e.rate}, lp::Rel::Le, e.cover_const, {}, "cap:" + e.tag);
        b.add_row({e.rate}, lp::Rel::Ge, 0.0, {}, "nonneg:" + e.tag);
    }

    // ---- packing rows ----
    for (DecoderSet N : sperner::all_decoders(spec.l)) {
        std::vector<std::size_t> dec, anc;
        for (std::size_t i = 0; i < elements.size(); ++i) {
            if (!family_decoded_at(elements[i].fam, N)) continue;
            dec.push_back(i);
            if (family_decoded_strictly_below(elements[i].fam, N)) anc.push_back(i);
        }
        if (dec.empty()) continue;
        std::vector<std::size_t> free;
        for (auto i : dec)
            if (std::find(anc.begin(), anc.end(), i) == anc.end()) free.push_back(i);
        if (free.size() > 16) throw std::invalid_argument("packing row blowup at decoder " + decoder_to_string(N));

        std::vector<std::string> dec_names;
        for (auto i : dec) dec_names.push_back(elements[i].var);
        const double h_dec = b.entropy(dec_names, false);

        for (std::uint64_t lm = 0; lm < (1ull << free.size()); ++lm) {
            std::vector<std::size_t> cond = anc;
            for (std::size_t i = 0; i < free.size(); ++i)
                if (lm >> i & 1) cond.push_back(free[i]);
            std::vector<std::string> cond_names;
            for (auto i : cond) cond_names.push_back(elements[i].var);
            const double lhs = h_dec - b.entropy(cond_names, false);

            // rhs: sum over decoded-but-not-conditioned elements
            std::vector<std::pair<std::size_t, double>> terms;
            double consts = 0;
            std::string tag = "pack:" + decoder_to_string(N) + ":";
            bool any = false;
            for (auto i : dec) {
                if (std::find(cond.begin(), cond.end(), i) != cond.end()) continue;
                any = true;
                consts += elements[i].cover_const;
                // + sum_{j in N ∩ support} rho_{e,j} - rate_e
                for (auto& [v, c] : elements[i].rate) terms.emplace_back(v, -c);
                for (auto& [j, var] : elements[i].rho)
                    if (N & (1u << (j - 1))) terms.emplace_back(var, 1.0);
                tag += elements[i].tag + ";";
            }
            // lhs <= consts + sum(rho) - sum(rate)  <=>  sum(rate) - sum(rho) <= consts - lhs
            std::vector<std::pair<std::size_t, double>> neg;
            for (auto& [v, c] : terms) neg.emplace_back(v, -c);
            if (!any && lhs <= 1e-12) continue;  // vacuous 0 <= 0
            b.add_row(std::move(neg), lp::Rel::Le, consts - lhs, {}, std::move(tag));
        }
    }

    // ---- rate assembly: description i carries bin rates up to the budget R_i
    // (the printed equality, relaxed to <= so the region is upward closed) ----
    for (int i = 1; i <= spec.l; ++i) {
        std::vector<std::pair<std::size_t, double>> terms;
        for (auto& e : elements)
            for (auto& [j, var] : e.rho)
                if (j == i) terms.emplace_back(var, 1.0);
        b.add_row(std::move(terms), lp::Rel::Le, 0.0, {{i, 1.0}}, "rate:R" + std::to_string(i));
    }

    // ---- nonnegative bin rates ----
    for (auto& e : elements)
        for (auto& [j, var] : e.rho)
            b.add_row({{{var, 1.0}}}, lp::Rel::Ge, 0.0, {}, "nonneg:rho:" + e.tag + ":d" + std::to_string(j));

    (void)coset_constants;
}

void add_u_elements(Builder& b, bool coset_constants) {
    const auto active = active_families(b.spec);
    for (const auto& [fam, var] : active) {
        b.pmf.index_of(var);  // throws on missing auxiliary
        if (coset_constants && b.pmf.alphabet(var) != int(b.spec.q))
            throw std::invalid_argument("auxiliary " + var + " is not on the field F_q");
        Element e;
        e.var = var;
        e.fam = fam;
        e.tag = "U" + family_to_string(fam);
        e.cover_const = coset_constants ? std::log2(double(b.spec.q)) : b.pmf.entropy({var});
        const std::size_t rv = b.add_var((coset_constants ? std::string("ro") : std::string("r")) +
                                         family_to_string(fam));
        e.rate = {{rv, 1.0}};
        const DecoderSet support = fam.support();
        for (int i = 1; i <= b.spec.l; ++i)
            if (support & (1u << (i - 1)))
                e.rho[i] = b.add_var("rho" + family_to_string(fam) + ":d" + std::to_string(i));
        b.elements.push_back(std::move(e));
    }
}

// V and W elements of one summation block (stages 2..4); returns the internal
// variable indices of the per-code outer rates and the lattice variables.
void add_summation_elements(Builder& b, const Summation& sum, int block_id) {
    const int m = int(sum.families.size());
    if (m < 2) throw std::invalid_argument("summation needs at least two codebooks");
    if (sum.v_vars.size() != std::size_t(m)) throw std::invalid_argument("summation variable list mismatch");
    const std::uint32_t q = sum.q;
    const double logq = std::log2(double(q));
    const std::string sfx = "#" + std::to_string(block_id);

    std::vector<SpernerFamily> all_f = sum.families;
    all_f.push_back(sum.sum_family);
    for (const auto& f : all_f)
        if (!sperner::is_sperner(f) || f.sets.empty())
            throw std::invalid_argument("summation family " + family_to_string(f) + " is not Sperner");
    for (int i = 0; i < m + 1; ++i)
        for (int j = i + 1; j < m + 1; ++j)
            if (all_f[std::size_t(i)] == all_f[std::size_t(j)])
                throw std::invalid_argument("summation families must be distinct");

    // outer rate variables r'_{o,A_k}
    std::vector<std::size_t> rv(static_cast<std::size_t>(m), 0);
    for (int k = 0; k < m; ++k) {
        b.pmf.index_of(sum.v_vars[std::size_t(k)]);
        if (b.pmf.alphabet(sum.v_vars[std::size_t(k)]) != int(q))
            throw std::invalid_argument("summation auxiliary " + sum.v_vars[std::size_t(k)] + " not on F_q");
        rv[std::size_t(k)] = b.add_var("rV" + family_to_string(sum.families[std::size_t(k)]) + sfx);
    }
    // shared-row lattice variables r_{i,J} for |J| >= 2
    const std::uint32_t full = (1u << m) - 1;
    std::map<std::uint32_t, std::size_t> lat;
    for (std::uint32_t J = 1; J <= full; ++J)
        if (std::popcount(J) >= 2) lat[J] = b.add_var("ri" + std::to_string(J) + sfx);

    auto rate_of_subset = [&](std::uint32_t J) {
        std::vector<std::pair<std::size_t, double>> expr;
        for (int k = 0; k < m; ++k)
            if (J >> k & 1) expr.emplace_back(rv[std::size_t(k)], 1.0);
        if (std::popcount(J) >= 2) expr.emplace_back(lat.at(J), -1.0);
        return expr;
    };

    // lattice feasibility: sum over strict supersets <= own rate; for
    // singletons the "own rate" is the code rate r'_{o,A_k}
    for (std::uint32_t J = 1; J <= full; ++J) {
        std::vector<std::pair<std::size_t, double>> terms;
        const std::uint32_t rest = full & ~J;
        for (std::uint32_t sub = rest; sub != 0; sub = (sub - 1) & rest) {
            terms.emplace_back(lat.at(J | sub), 1.0);
        }
        if (terms.empty()) continue;
        if (std::popcount(J) == 1) {
            terms.emplace_back(rv[std::size_t(std::countr_zero(J))], -1.0);
        } else {
            terms.emplace_back(lat.at(J), -1.0);
        }
        b.add_row(std::move(terms), lp::Rel::Le, 0.0, {}, "lattice" + sfx + ":" + std::to_string(J));
        // lattice variables are nonnegative
    }
    for (auto& [J, var] : lat) b.add_row({{{var, 1.0}}}, lp::Rel::Ge, 0.0, {}, "nonneg:ri" + sfx);

    // V elements
    for (int k = 0; k < m; ++k) {
        Element e;
        e.var = sum.v_vars[std::size_t(k)];
        e.fam = sum.families[std::size_t(k)];
        e.tag = "V" + family_to_string(e.fam) + sfx;
        e.cover_const = logq;
        e.rate = {{rv[std::size_t(k)], 1.0}};
        const DecoderSet support = e.fam.support();
        for (int i = 1; i <= b.spec.l; ++i)
            if (support & (1u << (i - 1)))
                e.rho[i] = b.add_var("rhoV" + family_to_string(e.fam) + sfx + ":d" + std::to_string(i));
        b.elements.push_back(std::move(e));
    }

    // W variants: one derived variable per nonzero coefficient vector; the
    // all-ones variant is the decoded one and carries the sum-codebook bins
    std::map<int, std::size_t> sum_rho;
    {
        const DecoderSet support = sum.sum_family.support();
        for (int i = 1; i <= b.spec.l; ++i)
            if (support & (1u << (i - 1)))
                sum_rho[i] = b.add_var("rhoW" + family_to_string(sum.sum_family) + sfx + ":d" + std::to_string(i));
    }
    std::vector<std::uint32_t> alpha(std::size_t(m), 0);
    std::size_t variants = 1;
    for (int k = 0; k < m; ++k) variants *= q;
    for (std::size_t a = 1; a < variants; ++a) {
        std::size_t tmp = a;
        std::uint32_t supp = 0;
        for (int k = 0; k < m; ++k) {
            alpha[std::size_t(k)] = std::uint32_t(tmp % q);
            if (alpha[std::size_t(k)]) supp |= (1u << k);
            tmp /= q;
        }
        // materialize W = sum alpha_k V_k as a function variable
        std::string name = "W" + sfx + ":";
        for (int k = 0; k < m; ++k) name += std::to_string(alpha[std::size_t(k)]);
        std::vector<int> vidx(static_cast<std::size_t>(m), 0);
        for (int k = 0; k < m; ++k) vidx[std::size_t(k)] = b.pmf.index_of(sum.v_vars[std::size_t(k)]);
        auto coeffs = alpha;
        b.pmf = b.pmf.with_function_variable(name, int(q), [vidx, coeffs, q](const std::vector<int>& asg) {
            std::uint64_t acc = 0;
            for (std::size_t k = 0; k < vidx.size(); ++k)
                acc += std::uint64_t(coeffs[k]) * std::uint64_t(asg[std::size_t(vidx[k])]);
            return int(acc % q);
        });

        Element e;
        e.var = name;
        e.fam = sum.sum_family;
        std::string digits;
        for (int k = 0; k < m; ++k) digits += std::to_string(alpha[std::size_t(k)]);
        e.tag = "W" + sfx + "(" + digits + ")";
        e.cover_const = logq;
        e.rate = rate_of_subset(supp);
        const bool all_ones = [&] {
            for (int k = 0; k < m; ++k)
                if (alpha[std::size_t(k)] != 1) return false;
            return true;
        }();
        if (all_ones) e.rho = sum_rho;
        // only the all-ones variant is decoded; the others participate in the
        // covering rows but never in packing
        if (!all_ones) e.fam = SpernerFamily{};  // empty family: decoded nowhere
        b.elements.push_back(std::move(e));
    }
}

BoundSystem ssc_like(const RegionSpec& spec, bool coset_constants) {
    Builder b(spec);
    add_u_elements(b, coset_constants);
    int block = 0;
    for (const auto& sum : spec.summations) add_summation_elements(b, sum, block++);
    generate_core(b, coset_constants);
    for (const auto& dec : spec.decoders) b.sys.distortion_of[dec.decoder] = evaluate_distortion(spec, dec);
    return std::move(b.sys);
}

}  // namespace

double evaluate_distortion(const RegionSpec& spec, const DecoderSpec& dec) {
    const auto& pmf = spec.pmf;
    std::vector<int> in_idx;
    std::vector<int> alphabets;
    for (const auto& name : dec.recon.inputs) {
        in_idx.push_back(pmf.index_of(name));
        alphabets.push_back(pmf.variables()[std::size_t(in_idx.back())].alphabet);
    }
    std::size_t table_size = 1;
    for (int a : alphabets) table_size *= std::size_t(a);
    if (dec.recon.table.size() != table_size)
        throw std::invalid_argument("reconstruction table size mismatch at decoder " +
                                    decoder_to_string(dec.decoder));
    const int x_idx = pmf.index_of(spec.source_var);
    return pmf.expectation([&](const std::vector<int>& asg) {
        std::size_t flat = 0;
        for (std::size_t i = 0; i < in_idx.size(); ++i)
            flat = flat * std::size_t(alphabets[i]) + std::size_t(asg[std::size_t(in_idx[i])]);
        const int xhat = dec.recon.table[flat];
        return dec.distortion.at(asg[std::size_t(x_idx)], xhat);
    });
}

BoundSystem ssc_bounds(const RegionSpec& spec) {
    if (spec.kind != Kind::SSC) throw std::invalid_argument("spec kind is not SSC");
    if (!spec.summations.empty()) throw std::invalid_argument("SSC takes no summation blocks");
    return ssc_like(spec, false);
}

BoundSystem nested_coset_bounds(const RegionSpec& spec) {
    if (spec.kind != Kind::Stage1) throw std::invalid_argument("spec kind is not Stage1");
    if (!spec.summations.empty()) throw std::invalid_argument("Stage 1 takes no summation blocks");
    return ssc_like(spec, true);
}

BoundSystem stage2_bounds(const RegionSpec& spec) {
    if (spec.kind != Kind::Stage2) throw std::invalid_argument("spec kind is not Stage2");
    if (spec.summations.size() != 1 || spec.summations[0].families.size() != 2)
        throw std::invalid_argument("Stage 2 takes exactly one summation of two codebooks");
    return ssc_like(spec, true);
}

BoundSystem stage3_bounds(const RegionSpec& spec) {
    if (spec.kind != Kind::Stage3) throw std::invalid_argument("spec kind is not Stage3");
    if (spec.summations.size() != 1) throw std::invalid_argument("Stage 3 takes exactly one summation");
    return ssc_like(spec, true);
}

BoundSystem stage4_bounds(const RegionSpec& spec) {
    if (spec.kind != Kind::Stage4) throw std::invalid_argument("spec kind is not Stage4");
    if (spec.summations.empty()) throw std::invalid_argument("Stage 4 needs at least one summation");
    return ssc_like(spec, true);
}

namespace {

std::string aux_var(const RegionSpec& spec, std::initializer_list<DecoderSet> fam) {
    SpernerFamily f{std::vector<DecoderSet>(fam)};
    std::sort(f.sets.begin(), f.sets.end());
    auto it = spec.aux.find(f);
    return it == spec.aux.end() ? std::string() : it->second;
}

void append_if(std::vector<std::string>& v, const std::string& name) {
    if (!name.empty()) v.push_back(name);
}

}  // namespace

BoundSystem egc_bounds(const RegionSpec& spec) {
    if (spec.kind != Kind::EGC) throw std::invalid_argument("spec kind is not EGC");
    if (spec.l != 2) throw std::invalid_argument("EGC is a two-description region");
    BoundSystem sys;
    sys.l = 2;
    const auto u1 = aux_var(spec, {0b01}), u2 = aux_var(spec, {0b10}), u12 = aux_var(spec, {0b11});
    std::vector<std::string> q_list;
    append_if(q_list, spec.ts_var);
    const auto& pmf = spec.pmf;
    auto mi = [&](std::vector<std::string> a, std::vector<std::string> bnames,
                  std::vector<std::string> given) {
        a.erase(std::remove(a.begin(), a.end(), std::string()), a.end());
        bnames.erase(std::remove(bnames.begin(), bnames.end(), std::string()), bnames.end());
        given.erase(std::remove(given.begin(), given.end(), std::string()), given.end());
        if (a.empty() || bnames.empty()) return 0.0;
        return pmf.mutual_information(a, bnames, given);
    };
    const std::string X = spec.source_var;
    const double i1 = mi({u1}, {X}, q_list);
    const double i2 = mi({u2}, {X}, q_list);
    const double isum = mi({u1, u2}, {X}, q_list) + mi({u1}, {u2}, q_list) +
                        mi({u12}, {X}, [&] {
                            std::vector<std::string> g{u1, u2};
                            append_if(g, spec.ts_var);
                            return g;
                        }());
    sys.rows.push_back({{}, lp::Rel::Le, -i1, {{1, 1.0}}, "egc:R1"});
    sys.rows.push_back({{}, lp::Rel::Le, -i2, {{2, 1.0}}, "egc:R2"});
    sys.rows.push_back({{}, lp::Rel::Le, -isum, {{1, 1.0}, {2, 1.0}}, "egc:sum"});
    for (const auto& dec : spec.decoders) sys.distortion_of[dec.decoder] = evaluate_distortion(spec, dec);
    return sys;
}

BoundSystem zb_bounds(const RegionSpec& spec) {
    if (spec.kind != Kind::ZB) throw std::invalid_argument("spec kind is not ZB");
    if (spec.l != 2) throw std::invalid_argument("ZB is a two-description region");
    BoundSystem sys;
    sys.l = 2;
    const auto c = aux_var(spec, {0b01, 0b10});  // U_{{1},{2}}, the common component
    const auto u1 = aux_var(spec, {0b01}), u2 = aux_var(spec, {0b10}), u12 = aux_var(spec, {0b11});
    const auto& pmf = spec.pmf;
    const std::string X = spec.source_var;
    auto mi = [&](std::vector<std::string> a, std::vector<std::string> bn, std::vector<std::string> g) {
        auto clean = [](std::vector<std::string>& v) {
            v.erase(std::remove(v.begin(), v.end(), std::string()), v.end());
        };
        clean(a);
        clean(bn);
        clean(g);
        if (a.empty() || bn.empty()) return 0.0;
        return pmf.mutual_information(a, bn, g);
    };
    const double i1 = mi({c, u1}, {X}, {});
    const double i2 = mi({c, u2}, {X}, {});
    const double isum = mi({c}, {X}, {}) + mi({c, u12, u1, u2}, {X}, {}) + mi({u1}, {u2}, {c});
    sys.rows.push_back({{}, lp::Rel::Le, -i1, {{1, 1.0}}, "zb:R1"});
    sys.rows.push_back({{}, lp::Rel::Le, -i2, {{2, 1.0}}, "zb:R2"});
    sys.rows.push_back({{}, lp::Rel::Le, -isum, {{1, 1.0}, {2, 1.0}}, "zb:sum"});
    for (const auto& dec : spec.decoders) sys.distortion_of[dec.decoder] = evaluate_distortion(spec, dec);
    return sys;
}

BoundSystem generate(const RegionSpec& spec) {
    switch (spec.kind) {
        case Kind::EGC: return egc_bounds(spec);
        case Kind::ZB: return zb_bounds(spec);
        case Kind::SSC: return ssc_bounds(spec);
        case Kind::Stage1: return nested_coset_bounds(spec);
        case Kind::Stage2: return stage2_bounds(spec);
        case Kind::Stage3: return stage3_bounds(spec);
        case Kind::Stage4: return stage4_bounds(spec);
    }
    throw std::logic_error("unknown region kind");
}

Membership check_membership(const BoundSystem& sys, const RdVector& v) {
    Membership out;
    for (const auto& [N, d] : sys.distortion_of) {
        auto it = v.distortions.find(N);
        if (it == v.distortions.end()) continue;  // unconstrained decoder
        if (it->second < d - 1e-9) {
            out.feasible = false;
            out.reason = "distortion at decoder " + decoder_to_string(N) + " below the evaluated floor " +
                         std::to_string(d);
            return out;
        }
    }
    lp::LinearSystem ls;
    ls.vars = sys.vars;
    for (const auto& row : sys.rows) {
        double b = row.b;
        for (auto& [i, c] : row.rate_coeff) {
            auto it = v.rates.find(i);
            if (it == v.rates.end()) throw std::invalid_argument("RD vector missing rate R" + std::to_string(i));
            b += c * it->second;
        }
        ls.add(row.a, row.rel, b, row.tag);
    }
    auto res = lp::check_feasible_auto(ls);
    out.feasible = res.feasible;
    if (!res.feasible) {
        out.reason = "rate system infeasible";
        return out;
    }
    for (std::size_t i = 0; i < sys.vars.size(); ++i) out.witness[sys.vars[i]] = res.x.size() > i ? res.x[i] : 0.0;
    return out;
}

ProjectedRegion project_region(const BoundSystem& sys, std::size_t var_cap) {
    const std::size_t nv = sys.vars.size();
    const std::size_t total = nv + std::size_t(sys.l);
    if (total > var_cap)
        throw std::invalid_argument("project_region: variable count exceeds cap; use pointwise checks");
    std::vector<lp::Ineq> rows;
    auto push = [&](const BoundSystem::Row& row, double sign) {
        lp::Ineq r;
        r.a.assign(total, 0.0);
        for (std::size_t i = 0; i < row.a.size(); ++i) r.a[i] = sign * row.a[i];
        for (auto& [i, c] : row.rate_coeff) r.a[nv + std::size_t(i - 1)] = -sign * c;
        r.b = sign * row.b;
        rows.push_back(std::move(r));
    };
    for (const auto& row : sys.rows) {
        if (row.rel == lp::Rel::Le || row.rel == lp::Rel::Eq) push(row, 1.0);
        if (row.rel == lp::Rel::Ge || row.rel == lp::Rel::Eq) push(row, -1.0);
    }
    std::vector<int> elim;
    for (std::size_t i = 0; i < nv; ++i) elim.push_back(int(i));
    auto projected = lp::fourier_motzkin(std::move(rows), elim);
    ProjectedRegion out;
    out.distortion_of = sys.distortion_of;
    for (auto& r : projected) {
        lp::Ineq slim;
        slim.a.assign(std::size_t(sys.l), 0.0);
        for (int i = 0; i < sys.l; ++i) slim.a[std::size_t(i)] = r.a[nv + std::size_t(i)];
        slim.b = r.b;
        out.rate_rows.push_back(std::move(slim));
    }
    return out;
}

}  // namespace mdlab::region
