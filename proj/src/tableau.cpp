#include "seamsim/tableau.hpp"

#include <cassert>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace seamsim {

namespace {

// Aaronson-Gottesman tableau over n qubits. Rows 0..n-1 are
// destabilizers, n..2n-1 stabilizers, row 2n is scratch. Row signs are
// affine GF(2) expressions: a constant bit plus a parity of coins minted
// by random measurements.
class CoinTableau {
  public:
    CoinTableau(size_t n, size_t max_coins)
        : n_(n), qw_((n + 63) / 64), cw_((max_coins + 63) / 64 + 1),
          bits_((2 * n + 1) * 2 * qw_, 0), r_(2 * n + 1, 0),
          coins_((2 * n + 1) * cw_, 0) {
        for (size_t i = 0; i < n_; ++i) {
            xw(i)[i / 64] |= 1ull << (i % 64);
            zw(n_ + i)[i / 64] |= 1ull << (i % 64);
        }
    }

    struct Expr {
        uint8_t c = 0;
        std::vector<uint64_t> coins;

        bool coin_free() const {
            for (uint64_t w : coins)
                if (w) return false;
            return true;
        }
    };

    void h(size_t a) {
        const size_t w = a / 64;
        const uint64_t m = 1ull << (a % 64);
        for (size_t i = 0; i < 2 * n_; ++i) {
            uint64_t& x = xw(i)[w];
            uint64_t& z = zw(i)[w];
            if ((x & m) && (z & m)) r_[i] ^= 1;
            const uint64_t xm = x & m, zm = z & m;
            x = (x & ~m) | zm;
            z = (z & ~m) | xm;
        }
    }

    void cx(size_t c, size_t t) {
        const size_t wc = c / 64, wt = t / 64;
        const uint64_t mc = 1ull << (c % 64), mt = 1ull << (t % 64);
        for (size_t i = 0; i < 2 * n_; ++i) {
            const bool xc = xw(i)[wc] & mc, zc = zw(i)[wc] & mc;
            const bool xt = xw(i)[wt] & mt, zt = zw(i)[wt] & mt;
            if (xc && zt && !(xt ^ zc)) r_[i] ^= 1;
            if (xc) xw(i)[wt] ^= mt;
            if (zt) zw(i)[wc] ^= mc;
        }
    }

    Expr measure(size_t a) {
        const size_t w = a / 64;
        const uint64_t m = 1ull << (a % 64);
        size_t p = 2 * n_;
        for (size_t i = n_; i < 2 * n_; ++i)
            if (xw(i)[w] & m) {
                p = i;
                break;
            }
        if (p < 2 * n_) {
            for (size_t i = 0; i < 2 * n_; ++i)
                if (i != p && (xw(i)[w] & m)) rowsum(i, p);
            copy_row(p - n_, p);
            std::memset(xw(p), 0, qw_ * 8);
            std::memset(zw(p), 0, qw_ * 8);
            zw(p)[w] |= m;
            r_[p] = 0;
            std::memset(coin(p), 0, cw_ * 8);
            const size_t c = num_coins_++;
            assert(c / 64 < cw_);
            coin(p)[c / 64] |= 1ull << (c % 64);
            Expr e;
            e.coins.assign(coin(p), coin(p) + cw_);
            return e;
        }
        const size_t s = 2 * n_;
        std::memset(xw(s), 0, qw_ * 8);
        std::memset(zw(s), 0, qw_ * 8);
        r_[s] = 0;
        std::memset(coin(s), 0, cw_ * 8);
        for (size_t i = 0; i < n_; ++i)
            if (xw(i)[w] & m) rowsum(s, i + n_);
        Expr e;
        e.c = r_[s];
        e.coins.assign(coin(s), coin(s) + cw_);
        return e;
    }

    void reset(size_t a) {
        Expr e = measure(a);
        const size_t w = a / 64;
        const uint64_t m = 1ull << (a % 64);
        // Conditional X(a) on the measured value restores |0>.
        for (size_t i = 0; i < 2 * n_; ++i)
            if (zw(i)[w] & m) {
                r_[i] ^= e.c;
                uint64_t* ci = coin(i);
                for (size_t k = 0; k < cw_; ++k) ci[k] ^= e.coins[k];
            }
    }

    size_t coin_words() const { return cw_; }

  private:
    uint64_t* xw(size_t row) { return bits_.data() + row * 2 * qw_; }
    uint64_t* zw(size_t row) { return bits_.data() + row * 2 * qw_ + qw_; }
    uint64_t* coin(size_t row) { return coins_.data() + row * cw_; }

    void copy_row(size_t dst, size_t src) {
        std::memcpy(xw(dst), xw(src), qw_ * 8);
        std::memcpy(zw(dst), zw(src), qw_ * 8);
        r_[dst] = r_[src];
        std::memcpy(coin(dst), coin(src), cw_ * 8);
    }

    // row h *= row i, with the standard mod-4 phase bookkeeping on the
    // constant part and GF(2) addition on the coin part.
    void rowsum(size_t h, size_t i) {
        long sum = 2L * r_[h] + 2L * r_[i];
        const uint64_t* ax = xw(i);
        const uint64_t* az = zw(i);
        uint64_t* bx = xw(h);
        uint64_t* bz = zw(h);
        for (size_t k = 0; k < qw_; ++k) {
            const uint64_t x1 = ax[k], z1 = az[k], x2 = bx[k], z2 = bz[k];
            const uint64_t plus = (x1 & z1 & z2 & ~x2) | (x1 & ~z1 & x2 & z2) | (~x1 & z1 & x2 & ~z2);
            const uint64_t minus = (x1 & z1 & x2 & ~z2) | (x1 & ~z1 & ~x2 & z2) | (~x1 & z1 & x2 & z2);
            sum += __builtin_popcountll(plus);
            sum -= __builtin_popcountll(minus);
        }
        sum &= 3;
        assert(sum == 0 || sum == 2);
        r_[h] = static_cast<uint8_t>(sum >> 1);
        for (size_t k = 0; k < qw_; ++k) {
            bx[k] ^= ax[k];
            bz[k] ^= az[k];
        }
        uint64_t* ch = coin(h);
        const uint64_t* ci = coin(i);
        for (size_t k = 0; k < cw_; ++k) ch[k] ^= ci[k];
    }

    size_t n_, qw_, cw_;
    std::vector<uint64_t> bits_;
    std::vector<uint8_t> r_;
    std::vector<uint64_t> coins_;
    size_t num_coins_ = 0;
};

} // namespace

bool check_deterministic(const CircuitIR& c, std::string* why) {
    validate_circuit(c);
    size_t max_coins = 0;
    for (const auto& ins : c.instructions)
        if (ins.gate == Gate::MZ || ins.gate == Gate::R || ins.gate == Gate::RX)
            max_coins += ins.targets.size();
    CoinTableau tab(c.num_qubits, max_coins);
    std::vector<CoinTableau::Expr> meas;
    meas.reserve(c.num_measurements());
    for (const auto& ins : c.instructions) {
        switch (ins.gate) {
        case Gate::R:
            for (uint32_t t : ins.targets) tab.reset(t);
            break;
        case Gate::RX:
            for (uint32_t t : ins.targets) {
                tab.reset(t);
                tab.h(t);
            }
            break;
        case Gate::H:
            for (uint32_t t : ins.targets) tab.h(t);
            break;
        case Gate::CX:
            for (size_t k = 0; k + 1 < ins.targets.size(); k += 2)
                tab.cx(ins.targets[k], ins.targets[k + 1]);
            break;
        case Gate::MZ:
            for (uint32_t t : ins.targets) meas.push_back(tab.measure(t));
            break;
        case Gate::IDLE:
            break;
        }
    }
    const size_t cw = tab.coin_words();
    std::vector<uint64_t> acc(cw);
    for (size_t d = 0; d < c.detectors.size(); ++d) {
        uint8_t cst = 0;
        std::fill(acc.begin(), acc.end(), 0);
        for (uint32_t m : c.detectors[d]) {
            cst ^= meas[m].c;
            for (size_t k = 0; k < cw; ++k) acc[k] ^= meas[m].coins[k];
        }
        bool coin_free = true;
        for (uint64_t w : acc) coin_free &= (w == 0);
        if (!coin_free || cst != 0) {
            if (why)
                *why = "detector " + std::to_string(d) +
                       (coin_free ? " has constant value 1" : " depends on random outcomes");
            return false;
        }
    }
    uint8_t cst = 0;
    std::fill(acc.begin(), acc.end(), 0);
    for (uint32_t m : c.observable) {
        cst ^= meas[m].c;
        for (size_t k = 0; k < cw; ++k) acc[k] ^= meas[m].coins[k];
    }
    for (uint64_t w : acc)
        if (w) {
            if (why) *why = "observable depends on random outcomes";
            return false;
        }
    (void)cst;
    return true;
}

} // namespace seamsim
