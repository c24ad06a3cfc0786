#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbc/rng.hpp"

namespace qbc {

// Ordered list of bits, first bit at index 0.
using bit_string = std::vector<std::uint8_t>;

bit_string bits_from_string(const std::string& s);
std::string bits_to_string(const bit_string& b);

int hamming_distance(const bit_string& a, const bit_string& b);
int hamming_weight(const bit_string& a);

// XOR over the bitwise AND of c and r (the mod-2 inner product c . r).
int dot_and_xor(const bit_string& c, const bit_string& r);

// Binary linear (n, k, d) block code given by a full-rank generator matrix,
// with all 2^k codewords enumerated. Enumeration bounds: n <= 24, k <= 16.
class linear_code {
public:
    static linear_code from_generator(std::vector<bit_string> rows);
    static linear_code repetition(int n);
    static linear_code hamming74();
    // Plain-text format: first line "k n", then k lines of n space-separated bits.
    static linear_code from_file(const std::string& path);
    // Resolves a built-in name ("hamming74", "repetition<n>") or a file path.
    static linear_code resolve(const std::string& name_or_path);

    int length() const { return n_; }
    int dimension() const { return k_; }
    int min_distance() const { return d_; }
    const std::vector<bit_string>& generator() const { return generator_; }
    const std::vector<bit_string>& codewords() const { return codewords_; }
    bool contains(const bit_string& word) const;
    const std::string& name() const { return name_; }

private:
    linear_code() = default;

    std::vector<bit_string> generator_;
    std::vector<bit_string> codewords_;
    int n_ = 0, k_ = 0, d_ = 0;
    std::string name_ = "custom";
};

// The key-string split of the codeword set: c0 holds codewords with
// c . r = 0, c1 those with c . r = 1. Both sides are nonempty by
// construction; make_partition rejects r otherwise.
struct partition {
    bit_string r;
    std::vector<bit_string> c0;
    std::vector<bit_string> c1;

    const std::vector<bit_string>& side(int b) const { return b == 0 ? c0 : c1; }
};

partition make_partition(const linear_code& code, bit_string r);

// Uniform nonzero r that yields a valid (two-sided) partition; r in the dual
// code would leave one side empty and is resampled.
bit_string sample_r(const linear_code& code, rng_stream& rng);

int min_distance_to_set(const bit_string& w, const std::vector<bit_string>& set);

struct sly_split {
    bit_string w;    // intermediate string, lexicographically smallest optimum
    int dist_to_c0;
    int dist_to_c1;
};

// Exhaustive search over all 2^n strings for the w minimizing
// max(dist(w, c0), dist(w, c1)). The optimum is always >= ceil(d/2).
sly_split sly_intermediate(const partition& p);

}  // namespace qbc
