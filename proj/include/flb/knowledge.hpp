#pragma once

#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flb/deduction.hpp"
#include "flb/error.hpp"
#include "flb/parser.hpp"
#include "flb/signature.hpp"
#include "flb/transition.hpp"

namespace flb {

struct NamedModel {
  std::string name;
  Transition t;
  int line = 0;
};

struct NamedDerivation {
  std::string name;
  Derivation dv;
  int line = 0;
};

/// A signature with named models, formula definitions and derivations, in file order.
struct KnowledgeFile {
  std::shared_ptr<const Signature> sig;
  std::vector<NamedModel> models;
  Definitions defs;
  std::vector<std::string> def_order;
  std::vector<NamedDerivation> derivations;

  const Transition* model(std::string_view name) const {
    for (const auto& m : models)
      if (m.name == name) return &m.t;
    return nullptr;
  }
  const Derivation* derivation(std::string_view name) const {
    for (const auto& d : derivations)
      if (d.name == name) return &d.dv;
    return nullptr;
  }
  FormulaPtr formula(std::string_view text) const { return parse_formula(text, *sig, &defs); }
};

namespace detail {

/// Builds a transition from the lines of a model block.
///   nodes N1 N2 ...          (may repeat; order is node order)
///   edge FUNC PARENT CHILD
///   pre|post P NODE...       pre|post LABEL NODE...
///   pre|post link A B        name NAME NODE...
class ModelReader {
 public:
  explicit ModelReader(std::shared_ptr<const Signature> sig) : sig_(std::move(sig)) {}

  void feed(const std::vector<std::string>& w, int line) {
    if (w[0] == "nodes") {
      if (started_) throw ParseError("'nodes' must precede all facts", line);
      for (size_t i = 1; i < w.size(); ++i) {
        if (!is_identifier(w[i])) throw ParseError("malformed node name '" + w[i] + "'", line);
        for (const auto& n : names_)
          if (n == w[i]) throw ParseError("duplicate node '" + w[i] + "'", line);
        names_.push_back(w[i]);
      }
      return;
    }
    start(line);
    if (w[0] == "edge") {
      if (w.size() != 4) throw ParseError("usage: edge FUNC PARENT CHILD", line);
      int f = sig_->child_index(w[1]);
      if (f < 0) throw ParseError("unknown child function '" + w[1] + "'", line);
      int x = node(w[2], line), y = node(w[3], line);
      if (x == y) throw ParseError("edge from '" + w[2] + "' to itself", line);
      if (t_.child[f][x] != x) throw ParseError("'" + w[2] + "' already has a " + w[1] + "-child", line);
      t_.child[f][x] = y;
      return;
    }
    if (w[0] == "name") {
      if (w.size() < 2) throw ParseError("usage: name NAME NODE...", line);
      int k = sig_->name_index(w[1]);
      if (k < 0) throw ParseError("unknown name '" + w[1] + "'", line);
      for (size_t i = 2; i < w.size(); ++i) t_.names[k].set(node(w[i], line));
      return;
    }
    if (w[0] == "pre" || w[0] == "post") {
      const bool post = w[0] == "post";
      if (w.size() < 2) throw ParseError("usage: " + w[0] + " SYMBOL NODE...", line);
      if (w[1] == "link") {
        if (w.size() != 4) throw ParseError("usage: " + w[0] + " link A B", line);
        (post ? t_.post_links : t_.pre_links).set(node(w[2], line), node(w[3], line));
        return;
      }
      NodeSet* dst = nullptr;
      if (w[1] == "P") {
        dst = post ? &t_.post_present : &t_.pre_present;
      } else if (int l = sig_->label_index(w[1]); l >= 0) {
        dst = post ? &t_.post_labels[l] : &t_.pre_labels[l];
      } else {
        throw ParseError("unknown dynamic symbol '" + w[1] + "'", line);
      }
      for (size_t i = 2; i < w.size(); ++i) dst->set(node(w[i], line));
      return;
    }
    throw ParseError("unknown model statement '" + w[0] + "'", line);
  }

  Transition take(int line) {
    start(line);
    return t_;
  }

 private:
  std::shared_ptr<const Signature> sig_;
  std::vector<std::string> names_;
  Transition t_;
  bool started_ = false;

  void start(int line) {
    if (started_) return;
    if (names_.size() > static_cast<size_t>(NodeSet::kCapacity)) throw ParseError("more than 64 nodes", line);
    t_ = Transition(sig_, names_);
    started_ = true;
  }

  int node(const std::string& n, int line) const {
    int i = t_.index_of(n);
    if (i < 0) throw ParseError("unknown node '" + n + "'", line);
    return i;
  }
};

}  // namespace detail

/// Parses a knowledge file. Blocks:
///   signature ... end            (exactly one, first)
///   model NAME ... end
///   def NAME(x, y) := FORMULA    (one line; may use earlier definitions)
///   derivation NAME ... end      (parenthesized derivation text)
/// '#' starts a comment outside derivation literals. Errors carry line numbers.
inline KnowledgeFile load_knowledge(std::string_view text) {
  KnowledgeFile kf;
  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(text)};
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }
  size_t i = 0;
  auto need_sig = [&](int line) {
    if (!kf.sig) throw ParseError("the signature block must come first", line);
  };
  while (i < lines.size()) {
    const int line = static_cast<int>(i) + 1;
    auto words = detail::split_words(detail::strip_comment(lines[i]));
    ++i;
    if (words.empty()) continue;
    const std::string& key = words[0];
    if (key == "signature") {
      if (kf.sig) throw ParseError("duplicate signature block", line);
      if (words.size() != 1) throw ParseError("'signature' takes no arguments", line);
      SignatureReader reader;
      bool closed = false;
      int at = line;
      while (i < lines.size()) {
        at = static_cast<int>(i) + 1;
        auto w = detail::split_words(detail::strip_comment(lines[i++]));
        if (w.empty()) continue;
        if (w.size() == 1 && w[0] == "end") {
          closed = true;
          break;
        }
        reader.feed(w, at);
      }
      if (!closed) throw ParseError("signature block not closed by 'end'", line);
      kf.sig = std::make_shared<const Signature>(reader.take(at));
    } else if (key == "model") {
      need_sig(line);
      if (words.size() != 2 || !is_identifier(words[1])) throw ParseError("usage: model NAME", line);
      if (kf.model(words[1])) throw ParseError("duplicate model name '" + words[1] + "'", line);
      detail::ModelReader reader(kf.sig);
      bool closed = false;
      int at = line;
      while (i < lines.size()) {
        at = static_cast<int>(i) + 1;
        auto w = detail::split_words(detail::strip_comment(lines[i++]));
        if (w.empty()) continue;
        if (w.size() == 1 && w[0] == "end") {
          closed = true;
          break;
        }
        reader.feed(w, at);
      }
      if (!closed) throw ParseError("model block not closed by 'end'", line);
      kf.models.push_back({words[1], reader.take(at), line});
    } else if (key == "def") {
      need_sig(line);
      std::string rest = detail::strip_comment(lines[i - 1]);
      rest = rest.substr(rest.find("def") + 3);
      auto assign = rest.find(":=");
      auto open = rest.find('('), close = rest.find(')');
      if (assign == std::string::npos) throw ParseError("usage: def NAME(vars) := FORMULA", line);
      std::string head = rest.substr(0, assign);
      std::string name;
      std::vector<std::string> params;
      if (open != std::string::npos && open < assign) {
        if (close == std::string::npos || close > assign) throw ParseError("unbalanced parameter list", line);
        name = head.substr(0, open);
        params = parse_variable_list(head.substr(open + 1, close - open - 1), line);
        if (head.find_first_not_of(" \t", close + 1) != std::string::npos) throw ParseError("text after parameter list", line);
      } else {
        name = head;
      }
      auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      name = trim(name);
      if (!is_identifier(name) || is_reserved_word(name)) throw ParseError("malformed definition name '" + name + "'", line);
      if (kf.sig->label_index(name) >= 0 || kf.sig->name_index(name) >= 0 || kf.sig->child_index(name) >= 0)
        throw ParseError("definition '" + name + "' collides with a signature symbol", line);
      if (kf.defs.count(name)) throw ParseError("duplicate definition '" + name + "'", line);
      for (size_t a = 0; a < params.size(); ++a)
        for (size_t b = a + 1; b < params.size(); ++b)
          if (params[a] == params[b]) throw ParseError("repeated parameter '" + params[a] + "'", line);
      auto body = parse_formula(rest.substr(assign + 2), *kf.sig, &kf.defs, line);
      for (const auto& v : free_variables(*body))
        if (std::find(params.begin(), params.end(), v) == params.end())
          throw ParseError("free variable '" + v + "' is not a parameter of '" + name + "'", line);
      kf.defs[name] = Definition{name, params, body};
      kf.def_order.push_back(name);
    } else if (key == "derivation") {
      need_sig(line);
      if (words.size() != 2 || !is_identifier(words[1])) throw ParseError("usage: derivation NAME", line);
      if (kf.derivation(words[1])) throw ParseError("duplicate derivation name '" + words[1] + "'", line);
      std::string body;
      bool closed = false;
      const int first = static_cast<int>(i) + 1;
      while (i < lines.size()) {
        auto w = detail::split_words(detail::strip_comment(lines[i]));
        if (w.size() == 1 && w[0] == "end") {
          ++i;
          closed = true;
          break;
        }
        body += lines[i++] + "\n";
      }
      if (!closed) throw ParseError("derivation block not closed by 'end'", line);
      kf.derivations.push_back({words[1], parse_derivation(body, *kf.sig, &kf.defs, first), line});
    } else {
      throw ParseError("unknown block '" + key + "'", line);
    }
  }
  if (!kf.sig) throw ParseError("missing signature block", static_cast<int>(lines.size()));
  return kf;
}

/// Serializes a model block in the format read by load_knowledge.
inline std::string save_model(const Transition& t, const std::string& name = "M") {
  std::ostringstream out;
  const auto& sig = *t.sig;
  auto nodes = [&](NodeSet s) {
    std::string r;
    s.for_each([&](int x) { r += " " + t.node_names[x]; });
    return r;
  };
  out << "model " << name << "\n";
  out << "nodes";
  for (const auto& n : t.node_names) out << " " << n;
  out << "\n";
  for (size_t f = 0; f < t.child.size(); ++f)
    for (int x = 0; x < t.size(); ++x)
      if (t.child[f][x] != x)
        out << "edge " << sig.children[f] << " " << t.node_names[x] << " " << t.node_names[t.child[f][x]] << "\n";
  for (bool post : {false, true}) {
    const char* tag = post ? "post" : "pre";
    if (!t.present(post).empty()) out << tag << " P" << nodes(t.present(post)) << "\n";
    for (size_t l = 0; l < sig.labels.size(); ++l)
      if (!t.labels(post)[l].empty()) out << tag << " " << sig.labels[l] << nodes(t.labels(post)[l]) << "\n";
    for (auto p : t.links(post).pairs())
      out << tag << " link " << t.node_names[p.a] << " " << t.node_names[p.b] << "\n";
  }
  for (size_t k = 0; k < sig.names.size(); ++k)
    if (!t.names[k].empty()) out << "name " << sig.names[k] << nodes(t.names[k]) << "\n";
  out << "end\n";
  return out.str();
}

/// The signature block in knowledge-file form.
inline std::string save_signature(const Signature& sig) { return "signature\n" + to_text(sig) + "end\n"; }

}  // namespace flb
