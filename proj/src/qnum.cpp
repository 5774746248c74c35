#include <stickbreak/qnum.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <utility>

#include <mpfr.h>

namespace stickbreak
{

namespace
{

void require_same_modulus(const QNumber &a, const QNumber &b)
{
    if (a.modulus() != b.modulus()) {
        throw modulus_mismatch("QNumber modulus mismatch: " + std::to_string(a.modulus()) + " vs "
                               + std::to_string(b.modulus()));
    }
}

// RAII wrapper around an mpfr_t.
class mpfr_value
{
public:
    explicit mpfr_value(mpfr_prec_t prec)
    {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    mpfr_value(const mpfr_value &) = delete;
    mpfr_value &operator=(const mpfr_value &) = delete;
    mpfr_value(mpfr_value &&other) noexcept
    {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
        mpfr_swap(v_, other.v_);
    }
    ~mpfr_value() { mpfr_clear(v_); }

    mpfr_ptr get() noexcept { return v_; }
    mpfr_srcptr get() const noexcept { return v_; }

private:
    mpfr_t v_;
};

struct mp_enclosure {
    mpfr_value lo;
    mpfr_value hi;
    explicit mp_enclosure(mpfr_prec_t prec) : lo(prec), hi(prec) {}
};

struct double_enclosure {
    double lo;
    double hi;
};

// Certified enclosures of q^x = 2^(x/m), x in [0, m). Both bounds come from a
// correctly rounded m-th root of the exact power 2^x.
std::vector<mp_enclosure> make_power_enclosures(unsigned m, mpfr_prec_t prec)
{
    std::vector<mp_enclosure> out;
    out.reserve(m);
    mpfr_value pow2(8);
    for (unsigned x = 0; x < m; ++x) {
        mpfr_set_ui_2exp(pow2.get(), 1, x, MPFR_RNDN);
        mp_enclosure e(prec);
        mpfr_rootn_ui(e.lo.get(), pow2.get(), m, MPFR_RNDD);
        mpfr_rootn_ui(e.hi.get(), pow2.get(), m, MPFR_RNDU);
        out.push_back(std::move(e));
    }
    return out;
}

const std::vector<mp_enclosure> &power_enclosures(unsigned m, mpfr_prec_t prec)
{
    thread_local std::map<std::pair<unsigned, mpfr_prec_t>, std::vector<mp_enclosure>> cache;
    auto key = std::make_pair(m, prec);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, make_power_enclosures(m, prec)).first;
    }
    return it->second;
}

const std::vector<double_enclosure> &double_power_enclosures(unsigned m)
{
    thread_local std::map<unsigned, std::vector<double_enclosure>> cache;
    auto it = cache.find(m);
    if (it == cache.end()) {
        std::vector<double_enclosure> v;
        v.reserve(m);
        for (const auto &e : power_enclosures(m, 53)) {
            v.push_back({mpfr_get_d(e.lo.get(), MPFR_RNDD), mpfr_get_d(e.hi.get(), MPFR_RNDU)});
        }
        it = cache.emplace(m, std::move(v)).first;
    }
    return it->second;
}

constexpr double inf = std::numeric_limits<double>::infinity();

double down(double x) { return std::nextafter(x, -inf); }
double up(double x) { return std::nextafter(x, inf); }

// Interval evaluation in hardware doubles. Every rounded operation is widened
// outward by one ulp, which dominates the round-to-nearest error. Returns false
// when some coefficient is not exactly representable.
bool enclose_double(const QNumber &a, double_enclosure &out)
{
    const auto &pw = double_power_enclosures(a.modulus());
    double lo = 0, hi = 0;
    for (unsigned x = 0; x < a.modulus(); ++x) {
        const auto &c = a[x];
        if (sgn(c) == 0) {
            continue;
        }
        if (!mpz_fits_slong_p(c.get_mpz_t())) {
            return false;
        }
        const long cv = c.get_si();
        if (cv > (1L << 53) || cv < -(1L << 53)) {
            return false;
        }
        const auto cd = static_cast<double>(cv);
        if (cv > 0) {
            lo = down(lo + down(cd * pw[x].lo));
            hi = up(hi + up(cd * pw[x].hi));
        } else {
            lo = down(lo + down(cd * pw[x].hi));
            hi = up(hi + up(cd * pw[x].lo));
        }
    }
    out = {lo, hi};
    return true;
}

mp_enclosure enclose_mp(const QNumber &a, mpfr_prec_t prec)
{
    const auto &pw = power_enclosures(a.modulus(), prec);
    mp_enclosure acc(prec);
    mpfr_value t(prec);
    for (unsigned x = 0; x < a.modulus(); ++x) {
        const auto &c = a[x];
        const int s = sgn(c);
        if (s == 0) {
            continue;
        }
        const auto &lo_src = s > 0 ? pw[x].lo : pw[x].hi;
        const auto &hi_src = s > 0 ? pw[x].hi : pw[x].lo;
        mpfr_mul_z(t.get(), lo_src.get(), c.get_mpz_t(), MPFR_RNDD);
        mpfr_add(acc.lo.get(), acc.lo.get(), t.get(), MPFR_RNDD);
        mpfr_mul_z(t.get(), hi_src.get(), c.get_mpz_t(), MPFR_RNDU);
        mpfr_add(acc.hi.get(), acc.hi.get(), t.get(), MPFR_RNDU);
    }
    return acc;
}

thread_local unsigned compare_rounds = 0;

} // namespace

QNumber::QNumber(unsigned m) : m_(m), coeffs_(m)
{
    if (m == 0) {
        throw std::invalid_argument("QNumber modulus must be positive");
    }
}

QNumber::QNumber(unsigned m, std::vector<BigInt> coeffs) : m_(m), coeffs_(std::move(coeffs))
{
    if (m == 0) {
        throw std::invalid_argument("QNumber modulus must be positive");
    }
    if (coeffs_.size() != m) {
        throw std::invalid_argument("QNumber needs exactly m coefficients");
    }
}

QNumber QNumber::from_int(unsigned m, long v)
{
    QNumber r(m);
    r.coeffs_[0] = v;
    return r;
}

bool QNumber::is_zero() const noexcept
{
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const BigInt &c) { return sgn(c) == 0; });
}

QNumber &QNumber::add_power(unsigned long k, long c)
{
    const auto x = static_cast<unsigned>(k % m_);
    const auto doublings = k / m_;
    if (doublings == 0) {
        coeffs_[x] += c;
    } else {
        BigInt term(c);
        term <<= static_cast<mp_bitcnt_t>(doublings);
        coeffs_[x] += term;
    }
    return *this;
}

QNumber &QNumber::operator+=(const QNumber &other)
{
    require_same_modulus(*this, other);
    for (unsigned x = 0; x < m_; ++x) {
        coeffs_[x] += other.coeffs_[x];
    }
    return *this;
}

QNumber &QNumber::operator-=(const QNumber &other)
{
    require_same_modulus(*this, other);
    for (unsigned x = 0; x < m_; ++x) {
        coeffs_[x] -= other.coeffs_[x];
    }
    return *this;
}

QNumber QNumber::operator-() const
{
    QNumber r(m_);
    for (unsigned x = 0; x < m_; ++x) {
        r.coeffs_[x] = -coeffs_[x];
    }
    return r;
}

QNumber operator*(const QNumber &a, const QNumber &b)
{
    require_same_modulus(a, b);
    const unsigned m = a.m_;

    std::vector<unsigned> nz_a, nz_b;
    bool small = true;
    for (unsigned x = 0; x < m; ++x) {
        if (sgn(a.coeffs_[x]) != 0) {
            nz_a.push_back(x);
            small = small && mpz_fits_sint_p(a.coeffs_[x].get_mpz_t());
        }
        if (sgn(b.coeffs_[x]) != 0) {
            nz_b.push_back(x);
            small = small && mpz_fits_sint_p(b.coeffs_[x].get_mpz_t());
        }
    }

    QNumber r(m);
    if (small) {
        // |products| < 2^62 and at most 2m of them land in one slot (with the
        // factor 2 from reduction), so 128-bit accumulators cannot overflow.
        std::vector<__int128> acc(m, 0);
        for (auto i : nz_a) {
            const __int128 ca = a.coeffs_[i].get_si();
            for (auto j : nz_b) {
                const __int128 p = ca * b.coeffs_[j].get_si();
                const unsigned k = i + j;
                if (k < m) {
                    acc[k] += p;
                } else {
                    acc[k - m] += 2 * p;
                }
            }
        }
        for (unsigned x = 0; x < m; ++x) {
            const __int128 v = acc[x];
            if (v >= std::numeric_limits<long>::min() && v <= std::numeric_limits<long>::max()) {
                r.coeffs_[x] = static_cast<long>(v);
            } else {
                const bool neg = v < 0;
                unsigned __int128 mag = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
                BigInt hi(static_cast<unsigned long>(mag >> 64));
                BigInt lo(static_cast<unsigned long>(mag & ~0UL));
                BigInt val = (hi << 64) + lo;
                r.coeffs_[x] = neg ? BigInt(-val) : val;
            }
        }
        return r;
    }

    BigInt p;
    for (auto i : nz_a) {
        for (auto j : nz_b) {
            p = a.coeffs_[i] * b.coeffs_[j];
            const unsigned k = i + j;
            if (k < m) {
                r.coeffs_[k] += p;
            } else {
                r.coeffs_[k - m] += p * 2;
            }
        }
    }
    return r;
}

bool operator==(const QNumber &a, const QNumber &b)
{
    return a.m_ == b.m_ && a.coeffs_ == b.coeffs_;
}

std::string QNumber::to_string() const
{
    std::ostringstream os;
    bool first = true;
    for (unsigned x = 0; x < m_; ++x) {
        const auto &c = coeffs_[x];
        if (sgn(c) == 0) {
            continue;
        }
        BigInt mag = abs(c);
        if (first) {
            if (sgn(c) < 0) {
                os << "-";
            }
        } else {
            os << (sgn(c) < 0 ? " - " : " + ");
        }
        first = false;
        if (x == 0) {
            os << mag;
            continue;
        }
        if (mag != 1) {
            os << mag << "*";
        }
        os << "q^" << x;
    }
    if (first) {
        os << "0";
    }
    return os.str();
}

QNumber q_power(unsigned m, unsigned long k)
{
    QNumber r(m);
    r.add_power(k, 1);
    return r;
}

QNumber add(const QNumber &a, const QNumber &b) { return a + b; }
QNumber sub(const QNumber &a, const QNumber &b) { return a - b; }
QNumber mul(const QNumber &a, const QNumber &b) { return a * b; }

int sign(const QNumber &a)
{
    compare_rounds = 0;
    if (a.is_zero()) {
        return 0;
    }

    compare_rounds = 1;
    double_enclosure d{};
    if (enclose_double(a, d)) {
        if (d.lo > 0) {
            return 1;
        }
        if (d.hi < 0) {
            return -1;
        }
    }

    // a != 0, so the enclosure eventually excludes zero.
    for (mpfr_prec_t prec = 106;; prec *= 2) {
        ++compare_rounds;
        auto e = enclose_mp(a, prec);
        if (mpfr_sgn(e.lo.get()) > 0) {
            return 1;
        }
        if (mpfr_sgn(e.hi.get()) < 0) {
            return -1;
        }
    }
}

std::strong_ordering compare(const QNumber &a, const QNumber &b)
{
    require_same_modulus(a, b);
    if (a == b) {
        compare_rounds = 0;
        return std::strong_ordering::equal;
    }
    double_enclosure ea{}, eb{};
    if (enclose_double(a, ea) && enclose_double(b, eb)) {
        compare_rounds = 1;
        if (ea.hi < eb.lo) {
            return std::strong_ordering::less;
        }
        if (ea.lo > eb.hi) {
            return std::strong_ordering::greater;
        }
    }
    const int s = sign(a - b);
    return s < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

double to_float(const QNumber &a, double rel_error_bound)
{
    if (!(rel_error_bound > 0)) {
        throw std::invalid_argument("to_float: relative error bound must be positive");
    }
    if (a.is_zero()) {
        return 0.0;
    }
    for (mpfr_prec_t prec = 64;; prec *= 2) {
        auto e = enclose_mp(a, prec);
        if (mpfr_sgn(e.lo.get()) != mpfr_sgn(e.hi.get())) {
            continue;
        }
        const double lo = mpfr_get_d(e.lo.get(), MPFR_RNDN);
        const double hi = mpfr_get_d(e.hi.get(), MPFR_RNDN);
        // Both ends round to the same double: that double is the correctly
        // rounded value, the best any bound can ask for.
        if (lo == hi) {
            return lo;
        }
        mpfr_value width(prec), mag(prec);
        mpfr_sub(width.get(), e.hi.get(), e.lo.get(), MPFR_RNDU);
        mpfr_abs(mag.get(), mpfr_sgn(e.lo.get()) > 0 ? e.lo.get() : e.hi.get(), MPFR_RNDD);
        mpfr_mul_d(mag.get(), mag.get(), rel_error_bound, MPFR_RNDD);
        // Half-width for the midpoint plus one double rounding of the result.
        if (mpfr_cmp(width.get(), mag.get()) <= 0 && rel_error_bound >= 0x1p-52) {
            mpfr_value mid(prec + 1);
            mpfr_add(mid.get(), e.lo.get(), e.hi.get(), MPFR_RNDN);
            mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
            return mpfr_get_d(mid.get(), MPFR_RNDN);
        }
    }
}

unsigned last_compare_rounds() noexcept { return compare_rounds; }

} // namespace stickbreak
