#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hrnr/error.hpp"
#include "hrnr/matrix.hpp"
#include "hrnr/matrix_poly.hpp"

namespace hrnr::io {

namespace detail {

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

// Start of the imaginary term: the last sign not belonging to an exponent.
inline std::size_t imaginary_split(std::string_view s) {
  for (std::size_t i = s.size(); i-- > 1;)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') return i;
  return 0;
}

}  // namespace detail

/// a | a+bi | a-bi | bi | i | -i, no interior whitespace.
inline bool parse_complex(std::string_view tok, cplx& out) {
  if (tok.empty()) return false;
  if (tok.back() != 'i') {
    double re = 0.0;
    if (!detail::parse_double(tok, re)) return false;
    out = {re, 0.0};
    return true;
  }
  tok.remove_suffix(1);
  const std::size_t split = detail::imaginary_split(tok);
  const std::string_view re_part = tok.substr(0, split);
  std::string_view im_part = tok.substr(split);
  double re = 0.0;
  if (!re_part.empty() && !detail::parse_double(re_part, re)) return false;
  double im = 0.0;
  if (im_part.empty() || im_part == "+")
    im = 1.0;
  else if (im_part == "-")
    im = -1.0;
  else if (!detail::parse_double(im_part, im))
    return false;
  out = {re, im};
  return true;
}

/// Shortest round-trip decimal.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return format_double(z.real());
  std::string im = format_double(std::abs(z.imag()));
  const char* sign = std::signbit(z.imag()) ? "-" : "+";
  if (z.real() == 0.0 && !std::signbit(z.real())) return (std::signbit(z.imag()) ? "-" : "") + im + "i";
  return format_double(z.real()) + sign + im + "i";
}

namespace detail {

struct LineReader {
  std::istream& in;
  std::size_t line_no = 0;

  // Next non-blank line with comments stripped, split on whitespace.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      tokens.clear();
      for (std::string t; ss >> t;) tokens.push_back(t);
      if (!tokens.empty()) return true;
    }
    return false;
  }
};

inline std::size_t parse_size(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ParseError("expected a non-negative integer, got '" + s + "'", line);
  return v;
}

inline Matrix read_body(LineReader& r, std::size_t n) {
  Matrix a(n, n);
  std::vector<std::string> tok;
  for (std::size_t i = 0; i < n; ++i) {
    if (!r.next(tok)) throw ParseError("unexpected end of input: expected " + std::to_string(n) + " rows", r.line_no);
    if (tok.size() != n)
      throw ParseError("row has " + std::to_string(tok.size()) + " entries, expected " + std::to_string(n), r.line_no);
    for (std::size_t j = 0; j < n; ++j)
      if (!parse_complex(tok[j], a(i, j))) throw ParseError("malformed complex entry '" + tok[j] + "'", r.line_no);
  }
  return a;
}

inline void expect_end(LineReader& r) {
  std::vector<std::string> tok;
  if (r.next(tok)) throw ParseError("trailing content after matrix data", r.line_no);
}

inline void write_body(std::ostream& out, const Matrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out << (j ? " " : "") << format_complex(a(i, j));
    out << '\n';
  }
}

}  // namespace detail

/// "n <dim>" then n rows of n entries. '#' starts a comment.
inline Matrix read_matrix(std::istream& in) {
  detail::LineReader r{in};
  std::vector<std::string> tok;
  if (!r.next(tok)) throw ParseError("empty input", r.line_no);
  if (tok.size() != 2 || tok[0] != "n") throw ParseError("expected header 'n <dim>'", r.line_no);
  const std::size_t n = detail::parse_size(tok[1], r.line_no);
  if (n == 0) throw ParseError("dimension must be positive", r.line_no);
  Matrix a = detail::read_body(r, n);
  detail::expect_end(r);
  return a;
}

/// "n <dim> m <degree>" then m blocks A_0 .. A_{m-1}.
inline MatrixPolynomial read_polynomial(std::istream& in) {
  detail::LineReader r{in};
  std::vector<std::string> tok;
  if (!r.next(tok)) throw ParseError("empty input", r.line_no);
  if (tok.size() != 4 || tok[0] != "n" || tok[2] != "m") throw ParseError("expected header 'n <dim> m <degree>'", r.line_no);
  const std::size_t n = detail::parse_size(tok[1], r.line_no);
  const std::size_t m = detail::parse_size(tok[3], r.line_no);
  if (n == 0 || m == 0) throw ParseError("dimension and degree must be positive", r.line_no);
  std::vector<Matrix> coeffs;
  for (std::size_t j = 0; j < m; ++j) coeffs.push_back(detail::read_body(r, n));
  detail::expect_end(r);
  return MatrixPolynomial(std::move(coeffs));
}

inline std::string write_matrix(const Matrix& a) {
  std::ostringstream out;
  out << "n " << a.rows() << '\n';
  detail::write_body(out, a);
  return out.str();
}

inline std::string write_polynomial(const MatrixPolynomial& l) {
  std::ostringstream out;
  out << "n " << l.n << " m " << l.m << '\n';
  for (std::size_t j = 0; j < l.m; ++j) {
    out << "# A_" << j << '\n';
    detail::write_body(out, l.coeffs[j]);
  }
  return out.str();
}

inline Matrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  return read_matrix(in);
}

inline MatrixPolynomial parse_polynomial(const std::string& text) {
  std::istringstream in(text);
  return read_polynomial(in);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "'", 0);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// FNV-1a over the bytes of the entries (real, imag as IEEE doubles).
inline std::uint64_t digest(const Matrix& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t dims[2] = {a.rows(), a.cols()};
  mix(dims, sizeof dims);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double parts[2] = {a(i, j).real(), a(i, j).imag()};
      mix(parts, sizeof parts);
    }
  return h;
}

inline std::uint64_t digest(const MatrixPolynomial& l) {
  std::uint64_t h = 0;
  for (const auto& c : l.coeffs) h = h * 0x100000001b3ULL ^ digest(c);
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[v & 0xF];
    v >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

}  // namespace hrnr::io
