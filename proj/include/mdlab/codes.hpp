#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "mdlab/gf.hpp"
#include "mdlab/info.hpp"
#include "mdlab/trellis.hpp"

namespace mdlab::codes {

// Codebooks up to this many message bits can be searched exhaustively.
constexpr double kEnumerableBits = 24.0;

// A coset code {uG + b}. Immutable after construction; the minimal trellis is
// built lazily for codes too large to enumerate (cached, shared across copies).
class CosetCode {
public:
    CosetCode() = default;
    CosetCode(gf::FieldMatrix generator, gf::FieldVector dither, std::uint64_t seed = 0);

    const gf::FieldMatrix& generator() const { return gen_; }
    const gf::FieldVector& dither() const { return dither_; }
    std::uint32_t q() const { return gen_.modulus(); }
    std::size_t n() const { return gen_.cols(); }
    std::size_t k() const { return gen_.rows(); }
    std::uint64_t seed() const { return seed_; }
    double rate_bits() const;  // (k/n) log2 q
    bool enumerable() const;

    gf::FieldVector encode(const gf::FieldVector& message) const;  // uG + b

    // Shared lazily-built trellis; throws when the state cap is exceeded.
    const trellis::Trellis& trellis(std::size_t state_cap = std::size_t(1) << 16) const;

private:
    gf::FieldMatrix gen_;
    gf::FieldVector dither_;
    std::uint64_t seed_ = 0;
    mutable std::shared_ptr<trellis::Trellis> trellis_;
};

CosetCode build_coset_code(std::uint32_t q, std::size_t n, std::size_t k, std::uint64_t seed);

// Random generator with staggered banded rows (row i supported on a window of
// `window` columns starting near i*n/k). The row space is a perfectly ordinary
// linear code, but its minimal trellis stays small: about k*window/n active
// rows per column, so Viterbi search over the full codebook is exact and fast.
CosetCode build_banded_code(std::uint32_t q, std::size_t n, std::size_t k, std::size_t window,
                            std::uint64_t seed);

// zero dither
CosetCode linear_code(gf::FieldMatrix generator);

struct QuantizationResult {
    gf::FieldVector message;   // may be empty when recovered via trellis on a rank-deficient code
    gf::FieldVector codeword;  // element of the coset code
    double distortion = 0;     // average per-symbol Hamming distortion
};

// Global minimum-Hamming-distance quantization. Exhaustive (lexicographically
// smallest message wins ties) for enumerable codes, exact Viterbi otherwise.
QuantizationResult quantize_min_hamming(const CosetCode& code, const gf::FieldVector& x,
                                        std::size_t state_cap = std::size_t(1) << 16,
                                        std::size_t beam = 0);

// Minimum-cost codeword for per-position cost tables cost[j*q + sym] over the
// actual codeword symbols (dither folded in). Trellis-backed.
QuantizationResult quantize_min_cost(const CosetCode& code, const std::vector<double>& costs,
                                     const gf::FieldVector& x, std::size_t state_cap = std::size_t(1) << 16,
                                     std::size_t beam = 0);

// First codeword in canonical message order jointly typical with x under
// `joint` (variable order (X, U)). Enumerable codes only.
std::optional<QuantizationResult> quantize_typical(const CosetCode& code, const gf::FieldVector& x,
                                                   const info::JointPmf& joint, double eps);

// Bin representative / quantization noise x - Q_i(x) for the coset partition
// induced by the inner code.
gf::FieldVector coset_bin(const CosetCode& inner, const gf::FieldVector& x,
                          std::size_t state_cap = std::size_t(1) << 16, std::size_t beam = 0);

gf::FieldVector nearest_codeword(const CosetCode& inner, const gf::FieldVector& y,
                                 std::size_t state_cap = std::size_t(1) << 16, std::size_t beam = 0);

struct NestedCosetPair {
    CosetCode inner;  // generator G (first k_i rows of the outer generator)
    CosetCode outer;  // generator [G; DG], same dither
};

NestedCosetPair build_nested_pair(std::uint32_t q, std::size_t n, std::size_t k_i, std::size_t k_o,
                                  std::uint64_t seed);
// Separate band widths for the inner rows and the extra outer rows: the inner
// code carries the channel-decoding load and wants a long constraint length,
// the refinement rows only pad the quantizer.
NestedCosetPair build_banded_nested_pair(std::uint32_t q, std::size_t n, std::size_t k_i, std::size_t k_o,
                                         std::size_t window_inner, std::size_t window_delta,
                                         std::uint64_t seed);

// Two nested pairs sharing the inner code: C1 = {aG + m DG + B},
// C2 = {bG + m' DG' + B'}; dithers independent.
struct SharedInnerPair {
    CosetCode c1, c2;
    std::size_t shared_k = 0;  // rows of G common to both generators
};

SharedInnerPair build_shared_inner_pair(std::uint32_t q, std::size_t n, std::size_t k, std::size_t l,
                                        std::size_t lp, std::uint64_t seed);
SharedInnerPair build_banded_shared_inner_pair(std::uint32_t q, std::size_t n, std::size_t k, std::size_t l,
                                               std::size_t lp, std::size_t window, std::uint64_t seed);

// alpha*C1 (+) beta*C2: generator rows = scaled rows of both codes (shared
// rows merged), dither = alpha b1 + beta b2.
CosetCode sum_code(const SharedInnerPair& pair, std::uint32_t alpha, std::uint32_t beta);

// Ensemble of m coset codes with prescribed pairwise/higher intersection rates:
// codes in J share exactly the row blocks of supersets of J. rows_by_subset
// maps a subset mask (over codes 0..m-1, popcount >= 2) to the row count shared
// by exactly that subset's supersets, via r_J = sum_{K >= J} s_K.
struct SharedInnerEnsemble {
    std::vector<CosetCode> codes;
    std::map<std::uint32_t, std::size_t> rows_exactly;  // s_K: rows shared by exactly the codes in K
    std::size_t intersection_rows(std::uint32_t subset_mask) const;  // sum over supersets
};

// rates r_J in bits/symbol for every nonempty J (|J|=1 entries are the code
// rates). Throws when the Moebius inversion yields a negative block.
SharedInnerEnsemble build_ensemble(std::uint32_t q, std::size_t n, int m,
                                   const std::map<std::uint32_t, double>& rate_by_subset, std::uint64_t seed);

// All q^k codewords in canonical message order (enumerable codes only).
std::vector<gf::FieldVector> enumerate_codebook(const CosetCode& code);

// Message of a linear-code word in the trellis span-form basis (rows ordered
// by span start, distinct starts). Throws when the word is not in the code.
gf::FieldVector span_form_message(const trellis::Trellis& t, const gf::FieldVector& linear_word);

}  // namespace mdlab::codes
