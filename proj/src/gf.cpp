#include "mdlab/gf.hpp"

#include <bit>
#include <stdexcept>

namespace mdlab::gf {

bool is_prime(std::uint32_t q) {
    if (q < 2) return false;
    for (std::uint64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

void check_prime(std::uint32_t q) {
    if (q > 251 || !is_prime(q))
        throw std::invalid_argument("field modulus must be a prime <= 251, got " + std::to_string(q));
}

FieldVector::FieldVector(std::size_t n, std::uint32_t q) : elems_(n, 0), q_(q) { check_prime(q); }

FieldVector::FieldVector(std::vector<std::uint8_t> elems, std::uint32_t q) : elems_(std::move(elems)), q_(q) {
    check_prime(q);
    for (auto e : elems_)
        if (e >= q_) throw std::invalid_argument("vector entry out of field range");
}

void FieldVector::set(std::size_t i, std::uint32_t v) {
    if (v >= q_) throw std::invalid_argument("entry out of field range");
    elems_[i] = std::uint8_t(v);
}

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols, std::uint32_t q)
    : rows_(rows), cols_(cols), data_(rows * cols, 0), q_(q) {
    check_prime(q);
}

void FieldMatrix::set(std::size_t r, std::size_t c, std::uint32_t v) {
    if (v >= q_) throw std::invalid_argument("entry out of field range");
    data_[r * cols_ + c] = std::uint8_t(v);
}

std::span<const std::uint8_t> FieldMatrix::row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
}

FieldMatrix FieldMatrix::stacked(const FieldMatrix& other) const {
    if (other.cols_ != cols_ || other.q_ != q_)
        throw std::invalid_argument("stacked: shape or modulus mismatch");
    FieldMatrix out(rows_ + other.rows_, cols_, q_);
    out.data_ = data_;
    out.data_.insert(out.data_.end(), other.data_.begin(), other.data_.end());
    return out;
}

FieldMatrix FieldMatrix::identity(std::size_t n, std::uint32_t q) {
    FieldMatrix m(n, n, q);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

FieldMatrix FieldMatrix::identity_like() const { return identity(rows_, q_); }

static void check_same(const FieldVector& a, const FieldVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
    if (a.modulus() != b.modulus()) throw std::invalid_argument("field modulus mismatch");
}

FieldVector vec_add(const FieldVector& a, const FieldVector& b) {
    check_same(a, b);
    const std::uint32_t q = a.modulus();
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::uint8_t((a[i] + b[i]) % q);
    return FieldVector(std::move(out), q);
}

FieldVector vec_sub(const FieldVector& a, const FieldVector& b) {
    check_same(a, b);
    const std::uint32_t q = a.modulus();
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::uint8_t((a[i] + q - b[i]) % q);
    return FieldVector(std::move(out), q);
}

FieldVector scalar_mul(std::uint32_t alpha, const FieldVector& a) {
    const std::uint32_t q = a.modulus();
    alpha %= q;
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::uint8_t((alpha * a[i]) % q);
    return FieldVector(std::move(out), q);
}

std::size_t hamming_distance(const FieldVector& a, const FieldVector& b) {
    check_same(a, b);
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
    return d;
}

std::size_t hamming_weight(const FieldVector& a) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < a.size(); ++i) w += (a[i] != 0);
    return w;
}

FieldVector mat_vec_mul(const FieldMatrix& m, const FieldVector& u) {
    if (u.size() != m.rows()) throw std::invalid_argument("mat_vec_mul: dimension mismatch");
    if (u.modulus() != m.modulus()) throw std::invalid_argument("mat_vec_mul: modulus mismatch");
    const std::uint32_t q = m.modulus();
    const std::size_t n = m.cols();
    std::vector<std::uint32_t> acc(n, 0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const std::uint32_t ur = u[r];
        if (ur == 0) continue;
        auto row = m.row(r);
        for (std::size_t c = 0; c < n; ++c) acc[c] += ur * row[c];
    }
    std::vector<std::uint8_t> out(n);
    for (std::size_t c = 0; c < n; ++c) out[c] = std::uint8_t(acc[c] % q);
    return FieldVector(std::move(out), q);
}

std::uint32_t inverse_mod(std::uint32_t a, std::uint32_t q) {
    a %= q;
    if (a == 0) throw std::invalid_argument("zero has no inverse");
    // q is prime, Fermat
    std::uint64_t base = a, result = 1;
    std::uint32_t e = q - 2;
    while (e) {
        if (e & 1) result = result * base % q;
        base = base * base % q;
        e >>= 1;
    }
    return std::uint32_t(result);
}

std::size_t rank(const FieldMatrix& m) {
    if (m.modulus() == 2) return Gf2Matrix(m).rank();
    const std::uint32_t q = m.modulus();
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<std::vector<std::uint32_t>> a(rows, std::vector<std::uint32_t>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) a[r][c] = m.at(r, c);
    std::size_t rk = 0;
    for (std::size_t c = 0; c < cols && rk < rows; ++c) {
        std::size_t piv = rk;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[rk]);
        const std::uint32_t inv = inverse_mod(a[rk][c], q);
        for (std::size_t j = c; j < cols; ++j) a[rk][j] = a[rk][j] * inv % q;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rk || a[r][c] == 0) continue;
            const std::uint32_t f = a[r][c];
            for (std::size_t j = c; j < cols; ++j) a[r][j] = (a[r][j] + (q - f) * a[rk][j]) % q;
        }
        ++rk;
    }
    return rk;
}

FieldMatrix random_matrix(std::size_t k, std::size_t n, std::uint32_t q, std::uint64_t seed) {
    check_prime(q);
    Rng rng(seed);
    FieldMatrix m(k, n, q);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < n; ++c) m.set(r, c, rng.field_elem(q));
    return m;
}

FieldVector random_vector(std::size_t n, std::uint32_t q, std::uint64_t seed) {
    check_prime(q);
    Rng rng(seed);
    FieldVector v(n, q);
    for (std::size_t i = 0; i < n; ++i) v.set(i, rng.field_elem(q));
    return v;
}

Gf2Matrix::Gf2Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64), bits_(rows * words_, 0) {}

Gf2Matrix::Gf2Matrix(const FieldMatrix& m) : Gf2Matrix(m.rows(), m.cols()) {
    if (m.modulus() != 2) throw std::invalid_argument("Gf2Matrix requires q=2");
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (m.at(r, c)) set(r, c, true);
}

bool Gf2Matrix::get(std::size_t r, std::size_t c) const {
    return (bits_[r * words_ + c / 64] >> (c % 64)) & 1;
}

void Gf2Matrix::set(std::size_t r, std::size_t c, bool v) {
    auto& w = bits_[r * words_ + c / 64];
    const std::uint64_t mask = 1ULL << (c % 64);
    if (v)
        w |= mask;
    else
        w &= ~mask;
}

void Gf2Matrix::xor_row(std::size_t dst, std::size_t src) {
    for (std::size_t w = 0; w < words_; ++w) bits_[dst * words_ + w] ^= bits_[src * words_ + w];
}

std::size_t Gf2Matrix::rank() const {
    std::vector<std::uint64_t> work = bits_;
    auto word = [&](std::size_t r, std::size_t w) -> std::uint64_t& { return work[r * words_ + w]; };
    std::size_t rk = 0;
    for (std::size_t c = 0; c < cols_ && rk < rows_; ++c) {
        const std::size_t w = c / 64;
        const std::uint64_t mask = 1ULL << (c % 64);
        std::size_t piv = rk;
        while (piv < rows_ && !(word(piv, w) & mask)) ++piv;
        if (piv == rows_) continue;
        for (std::size_t j = 0; j < words_; ++j) std::swap(word(piv, j), word(rk, j));
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r != rk && (word(r, w) & mask))
                for (std::size_t j = 0; j < words_; ++j) word(r, j) ^= word(rk, j);
        }
        ++rk;
    }
    return rk;
}

}  // namespace mdlab::gf
