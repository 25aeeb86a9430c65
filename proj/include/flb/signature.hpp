#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flb/error.hpp"

namespace flb {

/// Vocabulary of an n-FLB transition: tree height bound, ordered child functions,
/// dynamic labels and static names. P, Link, parent and starred forms are implicit.
struct Signature {
  int height = 0;
  std::vector<std::string> children;
  std::vector<std::string> labels;
  std::vector<std::string> names;

  int child_index(std::string_view s) const { return index_of(children, s); }
  int label_index(std::string_view s) const { return index_of(labels, s); }
  int name_index(std::string_view s) const { return index_of(names, s); }

  bool operator==(const Signature&) const = default;

  /// Number of nodes in the full tree of this height and branching.
  long template_size() const {
    long total = 0, level = 1;
    for (int i = 0; i <= height; ++i) {
      total += level;
      level *= static_cast<long>(children.size());
    }
    return total;
  }

 private:
  static int index_of(const std::vector<std::string>& v, std::string_view s) {
    auto it = std::find(v.begin(), v.end(), s);
    return it == v.end() ? -1 : static_cast<int>(it - v.begin());
  }
};

inline bool is_reserved_word(std::string_view s) {
  static const std::set<std::string, std::less<>> reserved = {
      "P", "Link", "parent", "forall", "exists", "minimize", "true", "false", "end", "Tsupp"};
  return reserved.count(s) > 0;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

namespace detail {

inline std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline std::string strip_comment(std::string_view line) {
  auto pos = line.find('#');
  return std::string(pos == std::string_view::npos ? line : line.substr(0, pos));
}

}  // namespace detail

/// Incremental reader for the four signature lines; shared with the knowledge-file loader.
class SignatureReader {
 public:
  /// Feeds one non-empty, comment-stripped line. Returns true once all four lines were seen.
  bool feed(const std::vector<std::string>& words, int line) {
    const std::string& key = words.at(0);
    int slot = key == "height" ? 0 : key == "children" ? 1 : key == "labels" ? 2 : key == "names" ? 3 : -1;
    if (slot < 0) throw ParseError("expected one of height/children/labels/names, got '" + key + "'", line);
    if (seen_[slot]) throw ParseError("duplicate '" + key + "' line", line);
    seen_[slot] = true;
    if (slot == 0) {
      if (words.size() != 2) throw ParseError("'height' takes exactly one integer", line);
      try {
        size_t used = 0;
        sig_.height = std::stoi(words[1], &used);
        if (used != words[1].size() || sig_.height < 0) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError("height must be a non-negative integer", line);
      }
    } else {
      auto& dst = slot == 1 ? sig_.children : slot == 2 ? sig_.labels : sig_.names;
      for (size_t i = 1; i < words.size(); ++i) {
        const std::string& w = words[i];
        if (!is_identifier(w)) throw ParseError("malformed symbol '" + w + "'", line);
        if (is_reserved_word(w)) throw ParseError("symbol '" + w + "' collides with a reserved name", line);
        if (!declared_.insert(w).second) throw ParseError("duplicate symbol '" + w + "'", line);
        dst.push_back(w);
      }
    }
    return complete();
  }

  bool complete() const { return seen_[0] && seen_[1] && seen_[2] && seen_[3]; }

  Signature take(int line) const {
    if (!complete()) throw ParseError("incomplete signature: need height, children, labels and names lines", line);
    return sig_;
  }

 private:
  Signature sig_;
  bool seen_[4] = {false, false, false, false};
  std::set<std::string> declared_;
};

/// Parses the line-oriented signature format:
///   height N / children IDENT* / labels IDENT* / names IDENT*
/// Lines may appear in any order; '#' starts a comment; an optional trailing `end` is accepted.
inline Signature parse_signature(std::string_view text, int first_line = 1) {
  SignatureReader reader;
  std::istringstream in{std::string(text)};
  int line_no = first_line - 1;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    auto words = detail::split_words(detail::strip_comment(raw));
    if (words.empty()) continue;
    if (words[0] == "end" && words.size() == 1) break;
    if (reader.complete()) throw ParseError("unexpected content after signature", line_no);
    reader.feed(words, line_no);
  }
  return reader.take(line_no);
}

inline std::string to_text(const Signature& sig) {
  std::ostringstream out;
  auto line = [&](const char* key, const std::vector<std::string>& v) {
    out << key;
    for (const auto& s : v) out << ' ' << s;
    out << '\n';
  };
  out << "height " << sig.height << '\n';
  line("children", sig.children);
  line("labels", sig.labels);
  line("names", sig.names);
  return out.str();
}

}  // namespace flb
