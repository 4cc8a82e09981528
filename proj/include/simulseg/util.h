#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace simulseg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tokenization on ASCII whitespace; never yields empty tokens.
std::vector<std::string> split_ws(const std::string& text);

// Splits on a single separator character, keeping empty fields.
std::vector<std::string> split_char(const std::string& text, char sep);

std::string join(const std::vector<std::string>& tokens, const std::string& sep);

// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t utf8_length(const std::string& text);

// The text broken into one string per UTF-8 code point.
std::vector<std::string> utf8_codepoints(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Stable fixed-precision formatting for report/CSV output.
std::string format_fixed(double value, int digits = 6);

// Full-precision formatting that round-trips doubles exactly.
std::string format_exact(double value);

double parse_double(const std::string& text);
std::size_t parse_size(const std::string& text);

// Fisher-Yates with explicit draws so shuffles are stable across standard
// library implementations.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(gen() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace simulseg
