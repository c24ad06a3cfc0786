#include "qbc/codes.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qbc {

namespace {

constexpr int kMaxLength = 24;
constexpr int kMaxDimension = 16;

// Mask layout: bit (n-1-i) of the mask holds bits[i], so ascending mask
// order is lexicographic order on the bit strings.
std::uint32_t to_mask(const bit_string& b) {
    std::uint32_t m = 0;
    const int n = static_cast<int>(b.size());
    for (int i = 0; i < n; ++i) {
        if (b[i]) m |= 1u << (n - 1 - i);
    }
    return m;
}

bit_string from_mask(std::uint32_t m, int n) {
    bit_string b(n, 0);
    for (int i = 0; i < n; ++i) {
        b[i] = (m >> (n - 1 - i)) & 1u;
    }
    return b;
}

// Rank over GF(2) by Gaussian elimination on row masks.
int gf2_rank(std::vector<std::uint32_t> rows) {
    int rank = 0;
    for (int bit = 31; bit >= 0; --bit) {
        std::uint32_t pivot = 0;
        std::size_t pivot_at = rows.size();
        for (std::size_t i = rank; i < rows.size(); ++i) {
            if (rows[i] >> bit & 1u) {
                pivot = rows[i];
                pivot_at = i;
                break;
            }
        }
        if (pivot_at == rows.size()) continue;
        std::swap(rows[rank], rows[pivot_at]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != static_cast<std::size_t>(rank) && (rows[i] >> bit & 1u)) {
                rows[i] ^= pivot;
            }
        }
        ++rank;
    }
    return rank;
}

}  // namespace

bit_string bits_from_string(const std::string& s) {
    bit_string b;
    b.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("bits_from_string: expected only 0/1");
        }
        b.push_back(c == '1' ? 1 : 0);
    }
    return b;
}

std::string bits_to_string(const bit_string& b) {
    std::string s;
    s.reserve(b.size());
    for (auto v : b) s.push_back(v ? '1' : '0');
    return s;
}

int hamming_distance(const bit_string& a, const bit_string& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("hamming_distance: length mismatch");
    }
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

int hamming_weight(const bit_string& a) {
    int w = 0;
    for (auto v : a) w += v != 0;
    return w;
}

int dot_and_xor(const bit_string& c, const bit_string& r) {
    if (c.size() != r.size()) {
        throw std::invalid_argument("dot_and_xor: length mismatch");
    }
    int acc = 0;
    for (std::size_t i = 0; i < c.size(); ++i) acc ^= c[i] & r[i];
    return acc;
}

linear_code linear_code::from_generator(std::vector<bit_string> rows) {
    if (rows.empty()) {
        throw std::invalid_argument("linear_code: generator must have at least one row");
    }
    const int k = static_cast<int>(rows.size());
    const int n = static_cast<int>(rows[0].size());
    if (n < 1 || n > kMaxLength || k > kMaxDimension || k > n) {
        throw std::invalid_argument("linear_code: size bounds are 1 <= k <= n <= 24, k <= 16");
    }
    std::vector<std::uint32_t> row_masks;
    row_masks.reserve(rows.size());
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n) {
            throw std::invalid_argument("linear_code: ragged generator matrix");
        }
        row_masks.push_back(to_mask(row));
    }
    if (gf2_rank(row_masks) != k) {
        throw std::invalid_argument("linear_code: generator rows are linearly dependent");
    }

    linear_code code;
    code.generator_ = std::move(rows);
    code.n_ = n;
    code.k_ = k;
    code.codewords_.reserve(std::size_t{1} << k);
    int min_weight = std::numeric_limits<int>::max();
    for (std::uint32_t msg = 0; msg < (1u << k); ++msg) {
        std::uint32_t word = 0;
        for (int i = 0; i < k; ++i) {
            if (msg >> i & 1u) word ^= row_masks[i];
        }
        if (word != 0) min_weight = std::min(min_weight, std::popcount(word));
        code.codewords_.push_back(from_mask(word, n));
    }
    std::sort(code.codewords_.begin(), code.codewords_.end());
    code.d_ = min_weight;
    return code;
}

linear_code linear_code::repetition(int n) {
    if (n < 1 || n > kMaxLength) {
        throw std::invalid_argument("repetition: n must be in [1, 24]");
    }
    linear_code code = from_generator({bit_string(n, 1)});
    code.name_ = "repetition" + std::to_string(n);
    return code;
}

linear_code linear_code::hamming74() {
    linear_code code = from_generator({
        bits_from_string("1000110"),
        bits_from_string("0100101"),
        bits_from_string("0010011"),
        bits_from_string("0001111"),
    });
    code.name_ = "hamming74";
    return code;
}

linear_code linear_code::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("linear_code: cannot open generator file: " + path);
    }
    int k = 0, n = 0;
    if (!(in >> k >> n) || k < 1 || n < 1) {
        throw std::invalid_argument("linear_code: generator file must start with \"k n\"");
    }
    std::vector<bit_string> rows(k, bit_string(n, 0));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < n; ++j) {
            int bit = 0;
            if (!(in >> bit) || (bit != 0 && bit != 1)) {
                throw std::invalid_argument("linear_code: malformed generator file: " + path);
            }
            rows[i][j] = static_cast<std::uint8_t>(bit);
        }
    }
    linear_code code = from_generator(std::move(rows));
    code.name_ = path;
    return code;
}

linear_code linear_code::resolve(const std::string& name_or_path) {
    if (name_or_path == "hamming74") return hamming74();
    if (name_or_path.rfind("repetition", 0) == 0) {
        const std::string suffix = name_or_path.substr(10);
        try {
            std::size_t used = 0;
            const int n = std::stoi(suffix, &used);
            if (used == suffix.size()) return repetition(n);
        } catch (const std::exception&) {
            // fall through to file lookup
        }
    }
    return from_file(name_or_path);
}

bool linear_code::contains(const bit_string& word) const {
    return std::binary_search(codewords_.begin(), codewords_.end(), word);
}

partition make_partition(const linear_code& code, bit_string r) {
    if (static_cast<int>(r.size()) != code.length()) {
        throw std::invalid_argument("make_partition: r must have length n");
    }
    if (hamming_weight(r) == 0) {
        throw std::invalid_argument("make_partition: r must be nonzero");
    }
    partition p;
    p.r = std::move(r);
    for (const auto& c : code.codewords()) {
        (dot_and_xor(c, p.r) == 0 ? p.c0 : p.c1).push_back(c);
    }
    if (p.c0.empty() || p.c1.empty()) {
        throw std::invalid_argument(
            "make_partition: r leaves one side of the partition empty (resample r)");
    }
    return p;
}

bit_string sample_r(const linear_code& code, rng_stream& rng) {
    const int n = code.length();
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const std::uint32_t mask = static_cast<std::uint32_t>(
            1 + rng.uniform_int((std::uint64_t{1} << n) - 1));
        bit_string r(n, 0);
        for (int i = 0; i < n; ++i) r[i] = (mask >> (n - 1 - i)) & 1u;
        int seen0 = 0, seen1 = 0;
        for (const auto& c : code.codewords()) {
            (dot_and_xor(c, r) == 0 ? seen0 : seen1) = 1;
            if (seen0 && seen1) return r;
        }
    }
    throw std::runtime_error("sample_r: no r splits this code (degenerate code)");
}

int min_distance_to_set(const bit_string& w, const std::vector<bit_string>& set) {
    if (set.empty()) {
        throw std::invalid_argument("min_distance_to_set: set must be nonempty");
    }
    int best = std::numeric_limits<int>::max();
    for (const auto& c : set) best = std::min(best, hamming_distance(w, c));
    return best;
}

sly_split sly_intermediate(const partition& p) {
    const int n = static_cast<int>(p.r.size());
    if (n > kMaxLength) {
        throw std::invalid_argument("sly_intermediate: n exceeds the 24-bit search bound");
    }
    std::vector<std::uint32_t> m0, m1;
    for (const auto& c : p.c0) m0.push_back(to_mask(c));
    for (const auto& c : p.c1) m1.push_back(to_mask(c));

    auto min_dist = [](std::uint32_t w, const std::vector<std::uint32_t>& side) {
        int best = std::numeric_limits<int>::max();
        for (std::uint32_t c : side) best = std::min(best, std::popcount(w ^ c));
        return best;
    };

    // Ascending mask order is lexicographic, so the first strict improvement
    // is automatically the lexicographically smallest optimum.
    sly_split best;
    int best_score = std::numeric_limits<int>::max();
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
        const auto wm = static_cast<std::uint32_t>(w);
        const int d0 = min_dist(wm, m0);
        const int d1 = min_dist(wm, m1);
        const int score = std::max(d0, d1);
        if (score < best_score) {
            best_score = score;
            best = {from_mask(wm, n), d0, d1};
        }
    }
    return best;
}

}  // namespace qbc
