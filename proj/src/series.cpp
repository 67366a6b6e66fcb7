#include "mls/series/series.hpp"

namespace mls {

std::string to_string(Grading g) {
  switch (g) {
    case Grading::Triangular:
      return "triangular";
    case Grading::StrictA:
      return "strict-a";
    case Grading::StrictB:
      return "strict-b";
    case Grading::Strict:
      return "strict";
  }
  return "unknown";
}

Grading parse_grading(const std::string& text) {
  for (Grading g : {Grading::Triangular, Grading::StrictA, Grading::StrictB, Grading::Strict})
    if (to_string(g) == text) return g;
  throw Error("unknown grading '" + text + "'");
}

}  // namespace mls
