#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mdlab::sperner {

// A decoder is a nonempty subset of the description set L = {1..l},
// held as a bitmask (bit i-1 <=> description i).
using DecoderSet = std::uint32_t;

// A Sperner family: sorted list of decoder masks, no member a subset of another.
struct SpernerFamily {
    std::vector<DecoderSet> sets;

    bool operator==(const SpernerFamily&) const = default;
    auto operator<=>(const SpernerFamily&) const = default;

    // union of all member sets (the tilde-M support: descriptions that bin this codebook)
    DecoderSet support() const;
    bool contains(DecoderSet s) const;
};

bool is_sperner(const SpernerFamily& family);

// All Sperner families over nonempty subsets of {1..l}, excluding the three
// trivial families (empty family, {empty set}, {L}). Canonical order: sorted
// member lists, compared lexicographically. Sizes for l=2,3,4: 3, 17, 165.
std::vector<SpernerFamily> enumerate_sperner(int l);

// All nonempty decoder subsets of {1..l}.
std::vector<DecoderSet> all_decoders(int l);

// M_N: indices into S of the families decoded at decoder N
// (families containing some subset of N).
std::vector<std::size_t> decoded_at(DecoderSet N, const std::vector<SpernerFamily>& S);

// tilde-M_N: union of decoded_at over nonempty strict subsets of N.
std::vector<std::size_t> ancestor_codebooks(DecoderSet N, const std::vector<SpernerFamily>& S);

std::string decoder_to_string(DecoderSet N);
std::string family_to_string(const SpernerFamily& f);

}  // namespace mdlab::sperner
