#pragma once

#include <string>
#include <vector>

namespace flb::test {

struct SuiteEntry {
  const char* name;
  const char* derivation;
};

/// Curated derivable judgments covering every rule. Uses only f1, Active and Src, so it reads
/// over both the Figure-1 signature and its one-function reduct.
inline const std::vector<SuiteEntry>& curated_suite() {
  static const std::vector<SuiteEntry> s = {
      {"Observation1", R"d((forallguard var=y (dynamic "!Active*(parent(x))") (dynamic "Link*(x,y)")))d"},
      {"Observation2", R"d((existsguard var=z (static "Src(z)") (dynamic "Link*(x,z)")))d"},
      {"Obs", R"d((bool op=and
                   (weak V="x" d=1 (forallguard var=y (dynamic "!Active*(parent(x))") (dynamic "Link*(x,y)")))
                   (existsguard var=z (static "Src(z)") (dynamic "Link*(x,z)"))))d"},
      {"DynamicLabel", R"d((dynamic "Active*(x)"))d"},
      {"StaticName", R"d((static "Src(x)"))d"},
      {"WeakStatic", R"d((weak V="x" d=2 (static "!Active(parent(x))")))d"},
      {"BoolOr", R"d((bool op=or (dynamic "P*(x)") (weak V="x" d=0 (static "Active(x)"))))d"},
      {"Invariant", R"d((invariant (dynamic "!Active*(x)")))d"},
      {"ExistsLink", R"d((existsguard var=y (dynamic "Active*(y)") (static "Link(x,y)")))d"},
      {"ForallProtected", R"d((forallguard var=y (dynamic "!P*(y)") (dynamic "Link*(x,y)")))d"},
      {"ForallStatic", R"d((forallguard var=y (static "Src(y)") (dynamic "Link*(x,y)")))d"},
      {"ForallChild", R"d((forallguard var=y (dynamic "Active*(y)") (static "y = f1(x)")))d"},
      {"Nested", R"d((existsguard var=z
                      (forallguard var=y (dynamic "!Active*(y)") (static "Link(z,y)"))
                      (dynamic "Link*(x,z)")))d"},
      {"ObsMin", R"d((circumscribe (bool op=and
                   (weak V="x" d=1 (forallguard var=y (dynamic "!Active*(parent(x))") (dynamic "Link*(x,y)")))
                   (existsguard var=z (static "Src(z)") (dynamic "Link*(x,z)")))))d"},
  };
  return s;
}

}  // namespace flb::test
