#include "mdlab/sperner.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mdlab::sperner {

DecoderSet SpernerFamily::support() const {
    DecoderSet u = 0;
    for (auto s : sets) u |= s;
    return u;
}

bool SpernerFamily::contains(DecoderSet s) const {
    return std::find(sets.begin(), sets.end(), s) != sets.end();
}

bool is_sperner(const SpernerFamily& family) {
    const auto& v = family.sets;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (i == j) continue;
            if ((v[i] & v[j]) == v[i]) return false;  // v[i] subset of v[j]
        }
    return true;
}

std::vector<DecoderSet> all_decoders(int l) {
    std::vector<DecoderSet> out;
    for (DecoderSet m = 1; m < (1u << l); ++m) out.push_back(m);
    return out;
}

std::vector<SpernerFamily> enumerate_sperner(int l) {
    if (l < 1 || l > 5) throw std::invalid_argument("enumerate_sperner supports 1 <= l <= 5");
    const DecoderSet full = (1u << l) - 1;
    std::vector<SpernerFamily> out;
    std::vector<DecoderSet> cur;

    // DFS over masks in increasing order; members sorted ascending by mask, so
    // enumeration is lexicographic in the sorted member sequence.
    auto dfs = [&](auto&& self, DecoderSet next) -> void {
        if (!cur.empty() && !(cur.size() == 1 && cur[0] == full)) out.push_back(SpernerFamily{cur});
        for (DecoderSet m = next; m <= full; ++m) {
            bool ok = true;
            for (auto s : cur) {
                if ((s & m) == s || (s & m) == m) {  // comparable
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            cur.push_back(m);
            self(self, m + 1);
            cur.pop_back();
        }
    };
    dfs(dfs, 1);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> decoded_at(DecoderSet N, const std::vector<SpernerFamily>& S) {
    if (N == 0) throw std::invalid_argument("decoder set must be nonempty");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < S.size(); ++i) {
        for (auto s : S[i].sets) {
            if ((s & N) == s) {  // s subset of N
                out.push_back(i);
                break;
            }
        }
    }
    return out;
}

std::vector<std::size_t> ancestor_codebooks(DecoderSet N, const std::vector<SpernerFamily>& S) {
    if (N == 0) throw std::invalid_argument("decoder set must be nonempty");
    std::vector<bool> in(S.size(), false);
    // nonempty strict subsets of N
    for (DecoderSet sub = (N - 1) & N; sub != 0; sub = (sub - 1) & N) {
        for (auto idx : decoded_at(sub, S)) in[idx] = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < S.size(); ++i)
        if (in[i]) out.push_back(i);
    return out;
}

std::string decoder_to_string(DecoderSet N) {
    std::string s = "{";
    bool first = true;
    for (int i = 0; i < 32; ++i) {
        if (N & (1u << i)) {
            if (!first) s += ",";
            s += std::to_string(i + 1);
            first = false;
        }
    }
    return s + "}";
}

std::string family_to_string(const SpernerFamily& f) {
    std::string s = "{";
    for (std::size_t i = 0; i < f.sets.size(); ++i) {
        if (i) s += ",";
        s += decoder_to_string(f.sets[i]);
    }
    return s + "}";
}

}  // namespace mdlab::sperner
