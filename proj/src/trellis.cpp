#include "mdlab/trellis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdlab::trellis {

namespace {

struct SpanRow {
    std::vector<std::uint8_t> v;
    int start = -1, end = -1;

    void recompute_span() {
        start = end = -1;
        for (int j = 0; j < int(v.size()); ++j) {
            if (v[std::size_t(j)]) {
                if (start < 0) start = j;
                end = j;
            }
        }
    }
};

// subtract factor*src from dst (mod q)
void row_sub(SpanRow& dst, const SpanRow& src, std::uint32_t factor, std::uint32_t q) {
    for (std::size_t j = 0; j < dst.v.size(); ++j)
        dst.v[j] = std::uint8_t((dst.v[j] + (q - factor % q) * src.v[j]) % q);
    dst.recompute_span();
}

}  // namespace

Trellis build_trellis(const gf::FieldMatrix& generator, std::size_t state_cap) {
    const std::uint32_t q = generator.modulus();
    const std::size_t n = generator.cols();

    std::vector<SpanRow> rows;
    for (std::size_t r = 0; r < generator.rows(); ++r) {
        SpanRow sr;
        sr.v.assign(generator.row(r).begin(), generator.row(r).end());
        sr.recompute_span();
        if (sr.start >= 0) rows.push_back(std::move(sr));
    }

    // forward pass: distinct span starts (row echelon on leading columns)
    for (;;) {
        std::sort(rows.begin(), rows.end(), [](const SpanRow& a, const SpanRow& b) { return a.start < b.start; });
        std::size_t dup = rows.size();
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            if (rows[i].start == rows[i + 1].start) {
                dup = i;
                break;
            }
        }
        if (dup == rows.size()) break;
        const std::size_t i = dup, j = dup + 1;
        const std::uint32_t f = (rows[j].v[std::size_t(rows[j].start)] *
                                 std::uint64_t(gf::inverse_mod(rows[i].v[std::size_t(rows[i].start)], q))) %
                                q;
        row_sub(rows[j], rows[i], f, q);
        if (rows[j].start < 0) rows.erase(rows.begin() + std::ptrdiff_t(j));
    }

    // backward pass: distinct span ends; subtract the later-starting row from
    // the earlier-starting one so starts stay distinct and ends shrink
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < rows.size() && !changed; ++i) {
            for (std::size_t j = 0; j < rows.size() && !changed; ++j) {
                if (i == j || rows[i].end != rows[j].end) continue;
                std::size_t lo = rows[i].start < rows[j].start ? i : j;  // earlier start
                std::size_t hi = lo == i ? j : i;
                const std::uint32_t f =
                    (rows[lo].v[std::size_t(rows[lo].end)] *
                     std::uint64_t(gf::inverse_mod(rows[hi].v[std::size_t(rows[hi].end)], q))) %
                    q;
                row_sub(rows[lo], rows[hi], f, q);
                if (rows[lo].start < 0) rows.erase(rows.begin() + std::ptrdiff_t(lo));
                changed = true;
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const SpanRow& a, const SpanRow& b) { return a.start < b.start; });

    Trellis t;
    t.q = q;
    t.n = n;
    t.cols.resize(n);
    t.span_form = gf::FieldMatrix(rows.size(), n, q);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (rows[r].v[c]) t.span_form.set(r, c, rows[r].v[c]);

    // active digit list maintained in row order (starts are increasing, so a
    // new row always appends at the top; deaths can happen anywhere)
    std::vector<int> active;  // row ids
    std::size_t next_row = 0;
    for (std::size_t j = 0; j < n; ++j) {
        auto& col = t.cols[j];
        col.in_count = std::uint32_t(active.size());
        if (next_row < rows.size() && rows[next_row].start == int(j)) {
            col.new_row = int(next_row);
            col.insert_pos = int(active.size());
            active.push_back(int(next_row));
            col.new_coef = rows[next_row].v[j];
            ++next_row;
        }
        col.mid_count = std::uint32_t(active.size());
        col.coefs.resize(active.size());
        for (std::size_t d = 0; d < active.size(); ++d) {
            col.coefs[d] = rows[std::size_t(active[d])].v[j];
            if (col.coefs[d]) col.coef_mask |= (1ULL << d);
        }
        // at most one row can end here (distinct ends)
        for (std::size_t d = 0; d < active.size(); ++d) {
            if (rows[std::size_t(active[d])].end == int(j)) {
                col.die_pos = int(d);
                active.erase(active.begin() + std::ptrdiff_t(d));
                break;
            }
        }
        if (col.mid_count > 62)
            throw std::invalid_argument("trellis active row count exceeds 62; narrow the band");
        std::size_t states = 1;
        for (std::uint32_t d = 0; d < col.mid_count; ++d) {
            if (states > state_cap / q)
                throw std::invalid_argument("trellis state cap exceeded (" + std::to_string(state_cap) +
                                            "); codebook too large to search and no decoder applies");
            states *= q;
        }
        t.max_states = std::max(t.max_states, states);
    }
    return t;
}

namespace {

inline std::size_t insert_digit(std::size_t state, int pos, std::uint32_t digit, std::uint32_t q,
                                const std::size_t* pow) {
    const std::size_t lo = state % pow[pos];
    const std::size_t hi = state / pow[pos];
    return lo + pow[pos] * (digit + q * hi);
}

inline std::uint32_t digit_at(std::size_t state, int pos, std::uint32_t q, const std::size_t* pow) {
    return std::uint32_t(state / pow[pos] % q);
}

inline std::size_t remove_digit(std::size_t state, int pos, std::uint32_t q, const std::size_t* pow) {
    const std::size_t lo = state % pow[pos];
    const std::size_t hi = state / (pow[pos] * q);
    return lo + pow[pos] * hi;
}

}  // namespace

namespace {

// q=2 fast path: states are bitmasks, at most one branching and one merging
// row per column
void binary_column(const Trellis::Column& col, const double* cj, const std::vector<double>& cur,
                   std::vector<double>& next, std::vector<std::uint16_t>& surv) {
    const std::size_t in_states = cur.size();
    const std::uint64_t coef = col.coef_mask;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    if (col.new_row >= 0) {
        const std::size_t pos = std::size_t(col.insert_pos);
        const std::uint64_t low = (std::uint64_t(1) << pos) - 1;
        const std::uint64_t newbit = std::uint64_t(1) << pos;
        const unsigned newcoef = (coef >> pos) & 1;
        if (col.die_pos < 0) {
            for (std::size_t s = 0; s < in_states; ++s) {
                const double base = cur[s];
                const std::size_t mid0 = ((s & ~low) << 1) | (s & low);
                const unsigned out0 = unsigned(std::popcount(std::uint64_t(mid0) & coef) & 1);
                const std::size_t os0 = mid0, os1 = mid0 | newbit;
                const double c0 = base + cj[out0];
                const double c1 = base + cj[out0 ^ newcoef];
                if (c0 < next[os0]) {
                    next[os0] = c0;
                    surv[os0] = 0;
                }
                if (c1 < next[os1]) {
                    next[os1] = c1;
                    surv[os1] = 1;
                }
            }
        } else {
            const std::size_t dpos = std::size_t(col.die_pos);
            const std::uint64_t dlow = (std::uint64_t(1) << dpos) - 1;
            for (std::size_t s = 0; s < in_states; ++s) {
                const double base = cur[s];
                if (base == kInf) continue;
                const std::size_t mid0 = ((s & ~low) << 1) | (s & low);
                const unsigned out0 = unsigned(std::popcount(std::uint64_t(mid0) & coef) & 1);
                for (unsigned v = 0; v < 2; ++v) {
                    const std::size_t mid = v ? (mid0 | newbit) : mid0;
                    const unsigned out = v ? (out0 ^ newcoef) : out0;
                    const unsigned died = unsigned((mid >> dpos) & 1);
                    const std::size_t os = ((mid >> 1) & ~dlow) | (mid & dlow);
                    const double c = base + cj[out];
                    if (c < next[os]) {
                        next[os] = c;
                        surv[os] = std::uint16_t(v | (died << 8));
                    }
                }
            }
        }
    } else if (col.die_pos >= 0) {
        const std::size_t dpos = std::size_t(col.die_pos);
        const std::uint64_t dlow = (std::uint64_t(1) << dpos) - 1;
        for (std::size_t s = 0; s < in_states; ++s) {
            const double base = cur[s];
            const unsigned out = unsigned(std::popcount(std::uint64_t(s) & coef) & 1);
            const unsigned died = unsigned((s >> dpos) & 1);
            const std::size_t os = ((s >> 1) & ~dlow) | (s & dlow);
            const double c = base + cj[out];
            if (c < next[os]) {
                next[os] = c;
                surv[os] = std::uint16_t(died << 8);
            }
        }
    } else {
        for (std::size_t s = 0; s < in_states; ++s) {
            const unsigned out = unsigned(std::popcount(std::uint64_t(s) & coef) & 1);
            next[s] = cur[s] + cj[out];
            surv[s] = 0;
        }
    }
}

}  // namespace

Trellis::Result Trellis::min_cost(const std::vector<double>& costs) const {
    if (costs.size() != n * q) throw std::invalid_argument("cost table size mismatch");
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::size_t pow_[64];
    pow_[0] = 1;
    for (int i = 1; i < 64; ++i) {
        // saturate; positions past the state cap are never dereferenced
        pow_[i] = pow_[i - 1] >= (std::size_t(1) << 40) ? pow_[i - 1] : pow_[i - 1] * q;
    }

    std::vector<double> cur(1, 0.0), next;
    // survivor per (column, out_state): branch symbol (0 if no new row) and the
    // dropped digit value, enough to reconstruct the path backwards
    std::vector<std::vector<std::uint16_t>> surv(n);

    for (std::size_t j = 0; j < n; ++j) {
        const auto& col = cols[j];
        std::size_t mid_states = 1;
        for (std::uint32_t d = 0; d < col.mid_count; ++d) mid_states *= q;
        const std::size_t out_states = col.die_pos >= 0 ? mid_states / q : mid_states;
        next.assign(out_states, kInf);
        surv[j].assign(out_states, 0);
        const double* cj = costs.data() + j * q;

        if (q == 2) {
            binary_column(col, cj, cur, next, surv[j]);
            cur.swap(next);
            continue;
        }

        const std::size_t in_states = cur.size();
        const std::uint32_t branches = col.new_row >= 0 ? q : 1;
        for (std::size_t s = 0; s < in_states; ++s) {
            const double base = cur[s];
            if (base == kInf) continue;
            for (std::uint32_t v = 0; v < branches; ++v) {
                std::size_t mid = col.new_row >= 0 ? insert_digit(s, col.insert_pos, v, q, pow_) : s;
                // output symbol = sum coefs[d]*digit_d mod q
                std::uint32_t out;
                if (q == 2) {
                    out = std::uint32_t(std::popcount(std::uint64_t(mid) & col.coef_mask) & 1);
                } else {
                    std::uint64_t acc = 0;
                    std::size_t tmp = mid;
                    for (std::uint32_t d = 0; d < col.mid_count; ++d) {
                        acc += std::uint64_t(col.coefs[d]) * (tmp % q);
                        tmp /= q;
                    }
                    out = std::uint32_t(acc % q);
                }
                const double c = base + cj[out];
                std::uint32_t died = 0;
                std::size_t os = mid;
                if (col.die_pos >= 0) {
                    died = digit_at(mid, col.die_pos, q, pow_);
                    os = remove_digit(mid, col.die_pos, q, pow_);
                }
                if (c < next[os]) {
                    next[os] = c;
                    surv[j][os] = std::uint16_t(v | (died << 8));
                }
            }
        }
        cur.swap(next);
    }

    // best final state (ties: smallest index)
    std::size_t best = 0;
    for (std::size_t s = 1; s < cur.size(); ++s)
        if (cur[s] < cur[best]) best = s;

    Result res;
    res.cost = cur[best];
    res.codeword.assign(n, 0);
    // backtrack
    std::size_t state = best;
    for (std::size_t jj = n; jj-- > 0;) {
        const auto& col = cols[jj];
        const std::uint16_t sv = surv[jj][state];
        const std::uint32_t v = sv & 0xff, died = sv >> 8;
        std::size_t mid = state;
        if (col.die_pos >= 0) mid = insert_digit(state, col.die_pos, died, q, pow_);
        std::uint32_t out;
        if (q == 2) {
            out = std::uint32_t(std::popcount(std::uint64_t(mid) & col.coef_mask) & 1);
        } else {
            std::uint64_t acc = 0;
            std::size_t tmp = mid;
            for (std::uint32_t d = 0; d < col.mid_count; ++d) {
                acc += std::uint64_t(col.coefs[d]) * (tmp % q);
                tmp /= q;
            }
            out = std::uint32_t(acc % q);
        }
        res.codeword[jj] = std::uint8_t(out);
        if (col.new_row >= 0) {
            // v is the digit at insert_pos in mid; removing it gives the previous state
            state = remove_digit(mid, col.insert_pos, q, pow_);
            (void)v;
        } else {
            state = mid;
        }
    }
    return res;
}

Trellis::Result Trellis::min_cost_beam(const std::vector<double>& costs, std::size_t beam) const {
    if (q != 2) throw std::invalid_argument("beam search supports q = 2 only");
    if (costs.size() != n * 2) throw std::invalid_argument("cost table size mismatch");
    if (beam < 2) throw std::invalid_argument("beam too small");

    // candidate lists sorted by state id; survivors kept per column for backtrack
    std::vector<std::uint64_t> st{0}, nst, tmp_st;
    std::vector<double> co{0.0}, nco, tmp_co;
    std::vector<std::uint8_t> sv, tmp_sv;
    std::vector<std::vector<std::uint64_t>> kept_st(n);
    std::vector<std::vector<std::uint8_t>> kept_sv(n);

    for (std::size_t j = 0; j < n; ++j) {
        const auto& col = cols[j];
        const double* cj = costs.data() + j * 2;
        const std::uint64_t coef = col.coef_mask;

        // stage A: branch on the new row (if any), keeping state order
        nst.clear();
        nco.clear();
        sv.clear();
        if (col.new_row >= 0) {
            const std::size_t pos = std::size_t(col.insert_pos);
            const std::uint64_t low = (std::uint64_t(1) << pos) - 1;
            const std::uint64_t bit = std::uint64_t(1) << pos;
            // two sorted streams: v = 0 and v = 1; merge by state id
            std::size_t i0 = 0, i1 = 0;
            const std::size_t m = st.size();
            while (i0 < m || i1 < m) {
                const std::uint64_t s0 =
                    i0 < m ? (((st[i0] & ~low) << 1) | (st[i0] & low)) : ~std::uint64_t(0);
                const std::uint64_t s1 =
                    i1 < m ? ((((st[i1] & ~low) << 1) | (st[i1] & low)) | bit) : ~std::uint64_t(0);
                if (s0 < s1) {
                    const unsigned out = unsigned(std::popcount(s0 & coef) & 1);
                    nst.push_back(s0);
                    nco.push_back(co[i0] + cj[out]);
                    sv.push_back(0);
                    ++i0;
                } else {
                    const unsigned out = unsigned(std::popcount(s1 & coef) & 1);
                    nst.push_back(s1);
                    nco.push_back(co[i1] + cj[out]);
                    sv.push_back(1);
                    ++i1;
                }
            }
        } else {
            for (std::size_t i = 0; i < st.size(); ++i) {
                const unsigned out = unsigned(std::popcount(st[i] & coef) & 1);
                nst.push_back(st[i]);
                nco.push_back(co[i] + cj[out]);
                sv.push_back(0);
            }
        }

        // stage B: merge out the dying row
        if (col.die_pos >= 0) {
            const std::size_t dpos = std::size_t(col.die_pos);
            const std::uint64_t dlow = (std::uint64_t(1) << dpos) - 1;
            const std::uint64_t dbit = std::uint64_t(1) << dpos;
            tmp_st.clear();
            tmp_co.clear();
            tmp_sv.clear();
            // two sorted sub-streams by the dying bit; compress preserves order
            std::size_t i0 = 0, i1 = 0;
            auto next_of = [&](std::size_t& idx, bool want_set) -> std::size_t {
                while (idx < nst.size() && bool(nst[idx] & dbit) != want_set) ++idx;
                return idx;
            };
            next_of(i0, false);
            next_of(i1, true);
            while (i0 < nst.size() || i1 < nst.size()) {
                const std::uint64_t c0 =
                    i0 < nst.size() ? (((nst[i0] >> 1) & ~dlow) | (nst[i0] & dlow)) : ~std::uint64_t(0);
                const std::uint64_t c1 =
                    i1 < nst.size() ? (((nst[i1] >> 1) & ~dlow) | (nst[i1] & dlow)) : ~std::uint64_t(0);
                std::uint64_t s;
                double c;
                std::uint8_t svv;
                if (c0 < c1) {
                    s = c0;
                    c = nco[i0];
                    svv = sv[i0];
                    ++i0;
                    next_of(i0, false);
                } else if (c1 < c0) {
                    s = c1;
                    c = nco[i1];
                    svv = std::uint8_t(sv[i1] | 2);
                    ++i1;
                    next_of(i1, true);
                } else {  // merge: same out state, keep the cheaper path
                    if (nco[i0] <= nco[i1]) {
                        s = c0;
                        c = nco[i0];
                        svv = sv[i0];
                    } else {
                        s = c1;
                        c = nco[i1];
                        svv = std::uint8_t(sv[i1] | 2);
                    }
                    ++i0;
                    next_of(i0, false);
                    ++i1;
                    next_of(i1, true);
                }
                tmp_st.push_back(s);
                tmp_co.push_back(c);
                tmp_sv.push_back(svv);
            }
            nst.swap(tmp_st);
            nco.swap(tmp_co);
            sv.swap(tmp_sv);
        }

        // prune to the beam
        if (nst.size() > beam) {
            tmp_co = nco;
            std::nth_element(tmp_co.begin(), tmp_co.begin() + std::ptrdiff_t(beam) - 1, tmp_co.end());
            const double thresh = tmp_co[beam - 1];
            std::size_t kept = 0, out_i = 0;
            for (std::size_t i = 0; i < nst.size() && kept < beam; ++i) {
                if (nco[i] <= thresh) {
                    nst[out_i] = nst[i];
                    nco[out_i] = nco[i];
                    sv[out_i] = sv[i];
                    ++kept;
                    ++out_i;
                }
            }
            nst.resize(out_i);
            nco.resize(out_i);
            sv.resize(out_i);
        }
        kept_st[j] = nst;
        kept_sv[j].assign(sv.begin(), sv.end());
        st.swap(nst);
        co.swap(nco);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < st.size(); ++i)
        if (co[i] < co[best]) best = i;

    Result res;
    res.cost = co[best];
    res.codeword.assign(n, 0);
    std::uint64_t state = st[best];
    for (std::size_t jj = n; jj-- > 0;) {
        const auto& col = cols[jj];
        const auto& ks = kept_st[jj];
        const std::size_t at =
            std::size_t(std::lower_bound(ks.begin(), ks.end(), state) - ks.begin());
        const std::uint8_t svv = kept_sv[jj][at];
        std::uint64_t mid = state;
        if (col.die_pos >= 0) {
            const std::size_t dpos = std::size_t(col.die_pos);
            const std::uint64_t dlow = (std::uint64_t(1) << dpos) - 1;
            mid = ((state & ~dlow) << 1) | (state & dlow) | ((svv & 2) ? (std::uint64_t(1) << dpos) : 0);
        }
        res.codeword[jj] = std::uint8_t(std::popcount(mid & col.coef_mask) & 1);
        if (col.new_row >= 0) {
            const std::size_t pos = std::size_t(col.insert_pos);
            const std::uint64_t low = (std::uint64_t(1) << pos) - 1;
            state = ((mid >> 1) & ~low) | (mid & low);
        } else {
            state = mid;
        }
    }
    return res;
}

}  // namespace mdlab::trellis
