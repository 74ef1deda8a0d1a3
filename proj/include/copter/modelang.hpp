#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "copter/modes.hpp"
#include "copter/profile.hpp"

namespace copter {

// Abstract syntax for regular expressions over the 7-symbol mode alphabet.
// Supported syntax: symbols, concatenation, alternation '|', grouping,
// postfix '*' and '+'. Precedence: star/plus > concatenation > alternation.
struct ModeRegex;
using ModeRegexPtr = std::shared_ptr<const ModeRegex>;

struct ModeRegex {
  enum class Kind { Symbol, Concat, Alternate, Star, Plus };
  Kind kind;
  Mode symbol = Mode::Walk;          // Kind::Symbol only
  std::vector<ModeRegexPtr> children;

  static ModeRegexPtr make_symbol(Mode m);
  static ModeRegexPtr make_concat(std::vector<ModeRegexPtr> parts);
  static ModeRegexPtr make_alternate(std::vector<ModeRegexPtr> parts);
  static ModeRegexPtr make_star(ModeRegexPtr inner);
  static ModeRegexPtr make_plus(ModeRegexPtr inner);
};

// Throws RegexSyntaxError with the offending position.
ModeRegexPtr parse_regex(std::string_view text);
std::string regex_to_string(const ModeRegexPtr& regex);

// Thompson NFA over the mode alphabet; exposed so the determinization and
// minimization steps can be tested independently.
struct ModeNfa {
  struct Transition {
    int from;
    int symbol;  // -1 for epsilon, else Mode index
    int to;
  };
  int n_states = 0;
  int start = 0;
  int accept = 0;
  std::vector<Transition> transitions;
};

// Deterministic, total automaton. A dead (non-accepting, self-looping) state
// is materialized whenever needed so the transition function is total.
class ModeDfa {
 public:
  ModeDfa() = default;
  ModeDfa(int n_states, int start, std::vector<bool> accepting,
          std::vector<int> transitions);

  int n_states() const { return n_states_; }
  int start() const { return start_; }
  bool accepting(int state) const { return accepting_[state]; }
  int next(int state, Mode m) const {
    return transitions_[state * kNumModes + static_cast<int>(m)];
  }

  // True when some word (possibly empty) leads from `state` to acceptance.
  // Lets the planner prune product states that can never complete.
  bool can_reach_accept(int state) const { return live_[state]; }

  // Word characters must be mode symbols; any other character rejects.
  bool accepts(std::string_view word) const;

 private:
  int n_states_ = 0;
  int start_ = 0;
  std::vector<bool> accepting_;
  std::vector<int> transitions_;  // n_states x kNumModes
  std::vector<bool> live_;
};

ModeNfa thompson_nfa(const ModeRegexPtr& regex);
ModeDfa determinize(const ModeNfa& nfa);
ModeDfa minimize(const ModeDfa& dfa);

// Thompson construction + subset construction + minimization.
ModeDfa compile_dfa(const ModeRegexPtr& regex);

// Modes a traveler can use for a given trip. Bus and subway are always
// candidates; walk is always available as an access/egress symbol, but a
// walk-only plan is eligible only under the sole-mode distance threshold.
struct CandidateModeSet {
  std::set<Mode> modes;
  bool walk_sole_mode = false;
};

inline constexpr double kMetersPerMile = 1609.34;
inline constexpr double kWalkSoleModeMaxM = 1.0 * kMetersPerMile;
inline constexpr double kCycleMaxM = 3.0 * kMetersPerMile;

CandidateModeSet candidate_modes(const TravelerProfile& profile,
                                 double trip_distance_m);

struct LanguageElement {
  std::string pattern;
  ModeRegexPtr regex;
  ModeDfa dfa;
};

LanguageElement make_language_element(const std::string& pattern);

// One element per eligible mode, in deterministic (w, c, b, s) order:
// "w*" when a walk-only plan is eligible, "c+" when cycling is eligible,
// and the walk-access transit languages "w*b+w*" and "w*s+w*" always.
// Throws EmptyLanguage when nothing is eligible.
std::vector<LanguageElement> language_set(const CandidateModeSet& candidates);

// Override file: one regex per line (blank lines and '#' comments ignored),
// used verbatim as the language set for every traveler.
std::vector<LanguageElement> load_language_file(
    const std::filesystem::path& path);

}  // namespace copter
