#ifndef INVFORGE_TESTS_SUPPORT_UTIL_HPP
#define INVFORGE_TESTS_SUPPORT_UTIL_HPP

// Shared plumbing for the test binaries: locating the source tree, loading
// corpus programs, and a token-level string comparison that ignores layout.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <invforge/lexer.hpp>
#include <invforge/typecheck.hpp>

namespace testutil {

inline std::filesystem::path source_dir() {
  return std::filesystem::path(INVFORGE_SOURCE_DIR);
}

inline std::filesystem::path corpus_dir() { return source_dir() / "corpus"; }

inline std::filesystem::path fixtures_dir() {
  return source_dir() / "tests" / "fixtures";
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// All .ivl files in a directory, sorted by file name.
inline std::vector<std::filesystem::path> ivl_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".ivl")
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline invforge::Program load_file(const std::filesystem::path& path) {
  return invforge::load_program(read_file(path), path.filename().string());
}

inline invforge::Program load_corpus(const std::string& name) {
  return load_file(corpus_dir() / name);
}

inline invforge::Program load_fixture(const std::string& name) {
  return load_file(fixtures_dir() / name);
}

// Token texts of a source snippet; comparing these checks two snippets are
// the same program text modulo whitespace.
inline std::vector<std::string> tokens_of(const std::string& text) {
  std::vector<std::string> out;
  for (const invforge::Token& t : invforge::tokenize(text, "<cmp>"))
    if (t.kind != invforge::Tok::Eof) out.push_back(t.text);
  return out;
}

}  // namespace testutil

#endif  // INVFORGE_TESTS_SUPPORT_UTIL_HPP
