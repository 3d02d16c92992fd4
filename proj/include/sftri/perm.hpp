#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sftri {

namespace detail {

constexpr std::array<std::array<std::uint8_t, 4>, 24> make_perm_images() {
    std::array<std::array<std::uint8_t, 4>, 24> out{};
    int n = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                if (b == a || c == a || c == b) continue;
                int d = 6 - a - b - c;
                out[n] = {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                          static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(d)};
                ++n;
            }
    return out;
}

inline constexpr auto perm_images = make_perm_images();

constexpr int perm_code_of(const std::array<std::uint8_t, 4>& im) {
    for (int i = 0; i < 24; ++i)
        if (perm_images[i] == im) return i;
    return -1;
}

constexpr std::array<std::uint8_t, 24> make_perm_inverse() {
    std::array<std::uint8_t, 24> out{};
    for (int i = 0; i < 24; ++i) {
        std::array<std::uint8_t, 4> inv{};
        for (int x = 0; x < 4; ++x) inv[perm_images[i][x]] = static_cast<std::uint8_t>(x);
        out[i] = static_cast<std::uint8_t>(perm_code_of(inv));
    }
    return out;
}

constexpr std::array<std::array<std::uint8_t, 24>, 24> make_perm_compose() {
    std::array<std::array<std::uint8_t, 24>, 24> out{};
    for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 24; ++j) {
            std::array<std::uint8_t, 4> im{};
            for (int x = 0; x < 4; ++x) im[x] = perm_images[i][perm_images[j][x]];
            out[i][j] = static_cast<std::uint8_t>(perm_code_of(im));
        }
    return out;
}

constexpr std::array<std::int8_t, 24> make_perm_sign() {
    std::array<std::int8_t, 24> out{};
    for (int i = 0; i < 24; ++i) {
        int inversions = 0;
        for (int x = 0; x < 4; ++x)
            for (int y = x + 1; y < 4; ++y)
                if (perm_images[i][x] > perm_images[i][y]) ++inversions;
        out[i] = (inversions % 2 == 0) ? 1 : -1;
    }
    return out;
}

inline constexpr auto perm_inverse_table = make_perm_inverse();
inline constexpr auto perm_compose_table = make_perm_compose();
inline constexpr auto perm_sign_table = make_perm_sign();

}  // namespace detail

// Permutation of the vertex labels {0,1,2,3} of a tetrahedron.
class VertexPerm {
public:
    constexpr VertexPerm() : code_(0) {}

    static constexpr VertexPerm from_code(int code) {
        VertexPerm p;
        p.code_ = static_cast<std::uint8_t>(code);
        return p;
    }

    static VertexPerm from_images(int a, int b, int c, int d) {
        std::array<std::uint8_t, 4> im = {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                                          static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(d)};
        int code = detail::perm_code_of(im);
        if (code < 0) throw std::invalid_argument("VertexPerm: images are not a permutation of {0,1,2,3}");
        return from_code(code);
    }

    // Transposition (i j); i == j gives the identity.
    static VertexPerm transposition(int i, int j) {
        std::array<std::uint8_t, 4> im = {0, 1, 2, 3};
        std::swap(im[i], im[j]);
        return from_code(detail::perm_code_of(im));
    }

    constexpr int operator[](int x) const { return detail::perm_images[code_][x]; }
    constexpr int code() const { return code_; }
    constexpr bool is_identity() const { return code_ == 0; }
    constexpr int sign() const { return detail::perm_sign_table[code_]; }

    VertexPerm inverse() const { return from_code(detail::perm_inverse_table[code_]); }

    // (a * b)(x) = a(b(x)).
    friend VertexPerm operator*(VertexPerm a, VertexPerm b) {
        return from_code(detail::perm_compose_table[a.code_][b.code_]);
    }

    friend bool operator==(VertexPerm a, VertexPerm b) { return a.code_ == b.code_; }
    friend bool operator!=(VertexPerm a, VertexPerm b) { return a.code_ != b.code_; }
    friend bool operator<(VertexPerm a, VertexPerm b) { return a.code_ < b.code_; }

    // Digits of the images of 0,1,2,3, e.g. the identity is "0123".
    std::string str() const {
        std::string s(4, '0');
        for (int x = 0; x < 4; ++x) s[x] = static_cast<char>('0' + (*this)[x]);
        return s;
    }

    static VertexPerm parse(const std::string& s) {
        if (s.size() != 4) throw std::invalid_argument("VertexPerm: expected 4 digits");
        std::array<std::uint8_t, 4> im{};
        for (int x = 0; x < 4; ++x) {
            if (s[x] < '0' || s[x] > '3') throw std::invalid_argument("VertexPerm: digit out of range");
            im[x] = static_cast<std::uint8_t>(s[x] - '0');
        }
        int code = detail::perm_code_of(im);
        if (code < 0) throw std::invalid_argument("VertexPerm: not a permutation");
        return from_code(code);
    }

private:
    std::uint8_t code_;
};

}  // namespace sftri
