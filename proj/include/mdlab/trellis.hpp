#pragma once

#include <cstdint>
#include <vector>

#include "mdlab/gf.hpp"

namespace mdlab::trellis {

// Minimal (BCJR) trellis of the row space of a generator matrix, built from
// its trellis-oriented span form. Distinct span starts/ends give at most one
// branching and one merging row per column, so the per-column transition is
// q branches out of each state at branching columns and 1 elsewhere.
//
// States at a boundary are the message symbols of the active rows, packed as
// base-q digits in row order (bits for q=2).
class Trellis {
public:
    struct Column {
        int new_row = -1;        // row starting at this column (-1: none)
        int insert_pos = -1;     // digit position where the new row enters
        std::uint8_t new_coef = 0;
        int die_pos = -1;        // digit position (after insert) removed after this column
        std::uint32_t in_count = 0;   // active digits at entry
        std::uint32_t mid_count = 0;  // digits including the new row
        std::vector<std::uint8_t> coefs;  // generator column over the mid-list digits
        std::uint64_t coef_mask = 0;      // q=2 fast path: bits of coefs
    };

    std::uint32_t q = 2;
    std::size_t n = 0;
    std::size_t max_states = 1;
    std::vector<Column> cols;
    // trellis-oriented generator (row space equals the input's)
    gf::FieldMatrix span_form;

    // Minimum-cost codeword of the LINEAR code (row space); costs are
    // per-position tables cost[j*q + symbol]. Deterministic tie-breaking by
    // scan order (lower state, then lower branch symbol, wins ties).
    struct Result {
        std::vector<std::uint8_t> codeword;  // linear-code word, length n
        double cost = 0;
    };
    Result min_cost(const std::vector<double>& costs) const;

    // Beam-limited Viterbi (q = 2 only): keeps the `beam` lowest-cost states
    // per boundary, so long-constraint codes stay decodable. Exact whenever
    // the state count never exceeds the beam.
    Result min_cost_beam(const std::vector<double>& costs, std::size_t beam) const;
};

// Throws std::invalid_argument when the state count would exceed `state_cap`.
Trellis build_trellis(const gf::FieldMatrix& generator, std::size_t state_cap = std::size_t(1) << 16);

}  // namespace mdlab::trellis
