#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdlab/rng.hpp"

namespace mdlab::gf {

bool is_prime(std::uint32_t q);
void check_prime(std::uint32_t q);

// A vector over the prime field F_q. Entries are stored as plain residues;
// all arithmetic is mod q. q is fixed per object and checked on mixing.
class FieldVector {
public:
    FieldVector() = default;
    FieldVector(std::size_t n, std::uint32_t q);
    FieldVector(std::vector<std::uint8_t> elems, std::uint32_t q);

    std::size_t size() const { return elems_.size(); }
    std::uint32_t modulus() const { return q_; }
    std::uint8_t operator[](std::size_t i) const { return elems_[i]; }
    void set(std::size_t i, std::uint32_t v);

    std::span<const std::uint8_t> raw() const { return elems_; }
    bool operator==(const FieldVector&) const = default;

private:
    std::vector<std::uint8_t> elems_;
    std::uint32_t q_ = 2;
};

class FieldMatrix {
public:
    FieldMatrix() = default;
    FieldMatrix(std::size_t rows, std::size_t cols, std::uint32_t q);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint32_t modulus() const { return q_; }
    std::uint8_t at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, std::uint32_t v);
    std::span<const std::uint8_t> row(std::size_t r) const;

    // rows of `other` appended below ours (same q, same cols)
    FieldMatrix stacked(const FieldMatrix& other) const;
    FieldMatrix identity_like() const;
    static FieldMatrix identity(std::size_t n, std::uint32_t q);

    bool operator==(const FieldMatrix&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::uint8_t> data_;
    std::uint32_t q_ = 2;
};

FieldVector vec_add(const FieldVector& a, const FieldVector& b);
FieldVector vec_sub(const FieldVector& a, const FieldVector& b);
FieldVector scalar_mul(std::uint32_t alpha, const FieldVector& a);
std::size_t hamming_distance(const FieldVector& a, const FieldVector& b);
std::size_t hamming_weight(const FieldVector& a);

// row vector u (length k) times k x n matrix
FieldVector mat_vec_mul(const FieldMatrix& m, const FieldVector& u);

std::size_t rank(const FieldMatrix& m);

FieldMatrix random_matrix(std::size_t k, std::size_t n, std::uint32_t q, std::uint64_t seed);
FieldVector random_vector(std::size_t n, std::uint32_t q, std::uint64_t seed);

std::uint32_t inverse_mod(std::uint32_t a, std::uint32_t q);

// Bit-packed F_2 matrix used on hot paths (rank, row reduction). Semantics
// match the generic path; tests cross-check the two.
class Gf2Matrix {
public:
    Gf2Matrix(std::size_t rows, std::size_t cols);
    explicit Gf2Matrix(const FieldMatrix& m);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool get(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, bool v);
    void xor_row(std::size_t dst, std::size_t src);
    std::size_t rank() const;

private:
    std::size_t rows_, cols_, words_;
    std::vector<std::uint64_t> bits_;
};

}  // namespace mdlab::gf
