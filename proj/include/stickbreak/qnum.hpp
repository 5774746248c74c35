#ifndef STICKBREAK_QNUM_HPP
#define STICKBREAK_QNUM_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace stickbreak
{

using BigInt = mpz_class;

struct modulus_mismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Exact element of Z[q] with q = 2^(1/m), stored in the reduced basis
// 1, q, ..., q^(m-1). Because x^m - 2 is irreducible the basis is linearly
// independent, so equality of values is equality of coefficient vectors.
class QNumber
{
public:
    // Zero of Z[2^(1/m)].
    explicit QNumber(unsigned m);
    QNumber(unsigned m, std::vector<BigInt> coeffs);

    static QNumber zero(unsigned m) { return QNumber(m); }
    static QNumber from_int(unsigned m, long v);

    unsigned modulus() const noexcept { return m_; }
    const std::vector<BigInt> &coeffs() const noexcept { return coeffs_; }
    const BigInt &operator[](unsigned x) const { return coeffs_[x]; }

    bool is_zero() const noexcept;

    // Adds c * q^k in place, reducing k with q^m = 2.
    QNumber &add_power(unsigned long k, long c = 1);

    QNumber &operator+=(const QNumber &other);
    QNumber &operator-=(const QNumber &other);
    QNumber operator-() const;

    friend QNumber operator+(QNumber a, const QNumber &b) { return a += b; }
    friend QNumber operator-(QNumber a, const QNumber &b) { return a -= b; }
    friend QNumber operator*(const QNumber &a, const QNumber &b);

    friend bool operator==(const QNumber &a, const QNumber &b);

    std::string to_string() const;

private:
    unsigned m_;
    std::vector<BigInt> coeffs_;
};

// q^k reduced so the exponent lies in [0, m).
QNumber q_power(unsigned m, unsigned long k);

QNumber add(const QNumber &a, const QNumber &b);
QNumber sub(const QNumber &a, const QNumber &b);
QNumber mul(const QNumber &a, const QNumber &b);

// Exact ordering of the real values. Equal is decided algebraically; otherwise
// a - b is enclosed in intervals of increasing precision until the sign is known.
std::strong_ordering compare(const QNumber &a, const QNumber &b);

// Sign of the real value: -1, 0 or +1.
int sign(const QNumber &a);

// Approximation with |result - value| <= rel_error_bound * |value|. Reporting only.
double to_float(const QNumber &a, double rel_error_bound = 1e-15);

// Number of precision rounds (hardware double first, then 106, 212, ... bits)
// needed by the most recent compare() on this thread. Diagnostics for tests.
unsigned last_compare_rounds() noexcept;

} // namespace stickbreak

#endif
