#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "flb/knowledge.hpp"

namespace flb::test {

inline std::shared_ptr<const Signature> make_sig(const std::string& text) {
  return std::make_shared<const Signature>(parse_signature(text));
}

inline const KnowledgeFile& fig1() {
  static const KnowledgeFile kf = [] {
    std::ifstream in(std::string(FLB_FIXTURE_DIR) + "/fig1.kf");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_knowledge(ss.str());
  }();
  return kf;
}

inline const Transition& fig1_T() { return *fig1().model("T"); }
inline const Transition& fig1_Tprime() { return *fig1().model("Tprime"); }

inline NodeSet nodes_of(const Transition& t, std::initializer_list<const char*> names) {
  NodeSet s;
  for (const char* n : names) s.set(t.index_of(n));
  return s;
}

}  // namespace flb::test
