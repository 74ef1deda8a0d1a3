#include "copter/modelang.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>

#include "copter/errors.hpp"

namespace copter {

ModeRegexPtr ModeRegex::make_symbol(Mode m) {
  auto node = std::make_shared<ModeRegex>();
  node->kind = Kind::Symbol;
  node->symbol = m;
  return node;
}

ModeRegexPtr ModeRegex::make_concat(std::vector<ModeRegexPtr> parts) {
  if (parts.size() == 1) return parts[0];
  auto node = std::make_shared<ModeRegex>();
  node->kind = Kind::Concat;
  node->children = std::move(parts);
  return node;
}

ModeRegexPtr ModeRegex::make_alternate(std::vector<ModeRegexPtr> parts) {
  if (parts.size() == 1) return parts[0];
  auto node = std::make_shared<ModeRegex>();
  node->kind = Kind::Alternate;
  node->children = std::move(parts);
  return node;
}

ModeRegexPtr ModeRegex::make_star(ModeRegexPtr inner) {
  auto node = std::make_shared<ModeRegex>();
  node->kind = Kind::Star;
  node->children = {std::move(inner)};
  return node;
}

ModeRegexPtr ModeRegex::make_plus(ModeRegexPtr inner) {
  auto node = std::make_shared<ModeRegex>();
  node->kind = Kind::Plus;
  node->children = {std::move(inner)};
  return node;
}

namespace {

// Recursive-descent parser.
//   alternation := concat ('|' concat)*
//   concat      := repeat+
//   repeat      := atom ('*' | '+')?
//   atom        := mode-symbol | '(' alternation ')'
class RegexParser {
 public:
  explicit RegexParser(std::string_view text) : text_(text) {}

  ModeRegexPtr parse() {
    if (text_.empty()) throw RegexSyntaxError(0, "empty pattern");
    auto node = parse_alternation();
    if (pos_ != text_.size()) {
      throw RegexSyntaxError(pos_, std::string("unexpected '") + text_[pos_] +
                                       "'");
    }
    return node;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  ModeRegexPtr parse_alternation() {
    std::vector<ModeRegexPtr> parts;
    parts.push_back(parse_concat());
    while (peek() == '|') {
      ++pos_;
      parts.push_back(parse_concat());
    }
    return ModeRegex::make_alternate(std::move(parts));
  }

  ModeRegexPtr parse_concat() {
    std::vector<ModeRegexPtr> parts;
    parts.push_back(parse_repeat());
    while (pos_ < text_.size() && peek() != '|' && peek() != ')') {
      parts.push_back(parse_repeat());
    }
    return ModeRegex::make_concat(std::move(parts));
  }

  ModeRegexPtr parse_repeat() {
    auto node = parse_atom();
    if (peek() == '*') {
      ++pos_;
      return ModeRegex::make_star(std::move(node));
    }
    if (peek() == '+') {
      ++pos_;
      return ModeRegex::make_plus(std::move(node));
    }
    return node;
  }

  ModeRegexPtr parse_atom() {
    const char c = peek();
    if (c == '(') {
      const std::size_t open = pos_++;
      auto node = parse_alternation();
      if (peek() != ')') throw RegexSyntaxError(open, "unbalanced '('");
      ++pos_;
      return node;
    }
    if (const auto mode = mode_from_symbol(c)) {
      ++pos_;
      return ModeRegex::make_symbol(*mode);
    }
    if (c == '\0') throw RegexSyntaxError(pos_, "unexpected end of pattern");
    throw RegexSyntaxError(pos_, std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void append_regex(const ModeRegexPtr& node, std::string& out) {
  switch (node->kind) {
    case ModeRegex::Kind::Symbol:
      out.push_back(mode_symbol(node->symbol));
      return;
    case ModeRegex::Kind::Concat:
      for (const auto& child : node->children) {
        const bool paren = child->kind == ModeRegex::Kind::Alternate;
        if (paren) out.push_back('(');
        append_regex(child, out);
        if (paren) out.push_back(')');
      }
      return;
    case ModeRegex::Kind::Alternate:
      for (std::size_t i = 0; i < node->children.size(); ++i) {
        if (i) out.push_back('|');
        append_regex(node->children[i], out);
      }
      return;
    case ModeRegex::Kind::Star:
    case ModeRegex::Kind::Plus: {
      const auto& child = node->children[0];
      const bool paren = child->kind != ModeRegex::Kind::Symbol;
      if (paren) out.push_back('(');
      append_regex(child, out);
      if (paren) out.push_back(')');
      out.push_back(node->kind == ModeRegex::Kind::Star ? '*' : '+');
      return;
    }
  }
}

}  // namespace

ModeRegexPtr parse_regex(std::string_view text) {
  return RegexParser(text).parse();
}

std::string regex_to_string(const ModeRegexPtr& regex) {
  std::string out;
  append_regex(regex, out);
  return out;
}

namespace {

struct NfaBuilder {
  ModeNfa nfa;

  int add_state() { return nfa.n_states++; }
  void add(int from, int symbol, int to) {
    nfa.transitions.push_back({from, symbol, to});
  }

  // Returns (start, accept) fragment for the subtree.
  std::pair<int, int> build(const ModeRegexPtr& node) {
    switch (node->kind) {
      case ModeRegex::Kind::Symbol: {
        const int s = add_state();
        const int t = add_state();
        add(s, static_cast<int>(node->symbol), t);
        return {s, t};
      }
      case ModeRegex::Kind::Concat: {
        auto [start, end] = build(node->children[0]);
        for (std::size_t i = 1; i < node->children.size(); ++i) {
          auto [s, t] = build(node->children[i]);
          add(end, -1, s);
          end = t;
        }
        return {start, end};
      }
      case ModeRegex::Kind::Alternate: {
        const int s = add_state();
        const int t = add_state();
        for (const auto& child : node->children) {
          auto [cs, ct] = build(child);
          add(s, -1, cs);
          add(ct, -1, t);
        }
        return {s, t};
      }
      case ModeRegex::Kind::Star: {
        const int s = add_state();
        const int t = add_state();
        auto [cs, ct] = build(node->children[0]);
        add(s, -1, cs);
        add(s, -1, t);
        add(ct, -1, cs);
        add(ct, -1, t);
        return {s, t};
      }
      case ModeRegex::Kind::Plus: {
        // r+ == r r*
        const int s = add_state();
        const int t = add_state();
        auto [cs, ct] = build(node->children[0]);
        add(s, -1, cs);
        add(ct, -1, cs);
        add(ct, -1, t);
        return {s, t};
      }
    }
    throw Error("unreachable regex kind");
  }
};

}  // namespace

ModeNfa thompson_nfa(const ModeRegexPtr& regex) {
  NfaBuilder builder;
  auto [start, accept] = builder.build(regex);
  builder.nfa.start = start;
  builder.nfa.accept = accept;
  return builder.nfa;
}

ModeDfa::ModeDfa(int n_states, int start, std::vector<bool> accepting,
                 std::vector<int> transitions)
    : n_states_(n_states),
      start_(start),
      accepting_(std::move(accepting)),
      transitions_(std::move(transitions)) {
  // Backward reachability to an accepting state.
  live_.assign(n_states_, false);
  for (int s = 0; s < n_states_; ++s) live_[s] = accepting_[s];
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < n_states_; ++s) {
      if (live_[s]) continue;
      for (int a = 0; a < kNumModes; ++a) {
        if (live_[transitions_[s * kNumModes + a]]) {
          live_[s] = true;
          changed = true;
          break;
        }
      }
    }
  }
}

bool ModeDfa::accepts(std::string_view word) const {
  int state = start_;
  for (char c : word) {
    const auto mode = mode_from_symbol(c);
    if (!mode) return false;
    state = next(state, *mode);
  }
  return accepting_[state];
}

ModeDfa determinize(const ModeNfa& nfa) {
  // Epsilon-closure via adjacency lists.
  std::vector<std::vector<int>> eps(nfa.n_states);
  std::vector<std::vector<std::pair<int, int>>> sym(nfa.n_states);
  for (const auto& t : nfa.transitions) {
    if (t.symbol < 0) {
      eps[t.from].push_back(t.to);
    } else {
      sym[t.from].push_back({t.symbol, t.to});
    }
  }

  auto closure = [&](std::vector<int> states) {
    std::vector<bool> in(nfa.n_states, false);
    std::queue<int> pending;
    for (int s : states) {
      if (!in[s]) {
        in[s] = true;
        pending.push(s);
      }
    }
    while (!pending.empty()) {
      const int s = pending.front();
      pending.pop();
      for (int t : eps[s]) {
        if (!in[t]) {
          in[t] = true;
          pending.push(t);
        }
      }
    }
    std::vector<int> out;
    for (int s = 0; s < nfa.n_states; ++s) {
      if (in[s]) out.push_back(s);
    }
    return out;  // sorted, canonical
  };

  std::map<std::vector<int>, int> subset_ids;
  std::vector<std::vector<int>> subsets;
  std::vector<int> transitions;
  std::vector<bool> accepting;

  auto intern = [&](std::vector<int> subset) {
    const auto it = subset_ids.find(subset);
    if (it != subset_ids.end()) return it->second;
    const int id = static_cast<int>(subsets.size());
    subset_ids.emplace(subset, id);
    subsets.push_back(std::move(subset));
    transitions.resize(transitions.size() + kNumModes, -1);
    accepting.push_back(false);
    return id;
  };

  const int start = intern(closure({nfa.start}));
  for (int id = 0; id < static_cast<int>(subsets.size()); ++id) {
    const auto subset = subsets[id];  // copy: subsets may reallocate
    accepting[id] = std::binary_search(subset.begin(), subset.end(),
                                       nfa.accept);
    for (int a = 0; a < kNumModes; ++a) {
      std::vector<int> moved;
      for (int s : subset) {
        for (const auto& [symbol, to] : sym[s]) {
          if (symbol == a) moved.push_back(to);
        }
      }
      std::sort(moved.begin(), moved.end());
      moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
      const int to_id = intern(closure(std::move(moved)));
      transitions[id * kNumModes + a] = to_id;
    }
  }
  // The empty subset, if ever produced, acts as the dead state and self-loops
  // by construction (closure of {} is {}).
  return ModeDfa(static_cast<int>(subsets.size()), start, accepting,
                 transitions);
}

ModeDfa minimize(const ModeDfa& dfa) {
  const int n = dfa.n_states();
  // Moore partition refinement, starting from {accepting, rejecting}.
  std::vector<int> block(n);
  for (int s = 0; s < n; ++s) block[s] = dfa.accepting(s) ? 1 : 0;

  int n_blocks = 2;
  bool changed = true;
  while (changed) {
    changed = false;
    // Signature: own block + successor blocks per symbol.
    std::map<std::vector<int>, int> sig_ids;
    std::vector<int> next_block(n);
    for (int s = 0; s < n; ++s) {
      std::vector<int> sig;
      sig.reserve(kNumModes + 1);
      sig.push_back(block[s]);
      for (int a = 0; a < kNumModes; ++a) {
        sig.push_back(block[dfa.next(s, static_cast<Mode>(a))]);
      }
      const auto it = sig_ids.find(sig);
      if (it == sig_ids.end()) {
        const int id = static_cast<int>(sig_ids.size());
        sig_ids.emplace(std::move(sig), id);
        next_block[s] = id;
      } else {
        next_block[s] = it->second;
      }
    }
    if (static_cast<int>(sig_ids.size()) != n_blocks) changed = true;
    n_blocks = static_cast<int>(sig_ids.size());
    block = std::move(next_block);
  }

  // Renumber blocks so the start block is reachable-ordered (BFS) for a
  // canonical result; unreachable blocks are dropped.
  std::vector<int> renumber(n_blocks, -1);
  std::vector<int> order;
  std::queue<int> pending;
  renumber[block[dfa.start()]] = 0;
  order.push_back(dfa.start());
  pending.push(dfa.start());
  int next_id = 1;
  while (!pending.empty()) {
    const int s = pending.front();
    pending.pop();
    for (int a = 0; a < kNumModes; ++a) {
      const int t = dfa.next(s, static_cast<Mode>(a));
      if (renumber[block[t]] < 0) {
        renumber[block[t]] = next_id++;
        order.push_back(t);
        pending.push(t);
      }
    }
  }

  std::vector<bool> accepting(next_id, false);
  std::vector<int> transitions(next_id * kNumModes, 0);
  for (int rep : order) {
    const int id = renumber[block[rep]];
    accepting[id] = dfa.accepting(rep);
    for (int a = 0; a < kNumModes; ++a) {
      transitions[id * kNumModes + a] =
          renumber[block[dfa.next(rep, static_cast<Mode>(a))]];
    }
  }
  return ModeDfa(next_id, 0, accepting, transitions);
}

ModeDfa compile_dfa(const ModeRegexPtr& regex) {
  return minimize(determinize(thompson_nfa(regex)));
}

CandidateModeSet candidate_modes(const TravelerProfile& profile,
                                 double trip_distance_m) {
  CandidateModeSet out;
  out.modes.insert(Mode::Walk);  // access/egress always
  out.modes.insert(Mode::Bus);
  out.modes.insert(Mode::Subway);
  if (profile.owns_bicycle() && trip_distance_m < kCycleMaxM) {
    out.modes.insert(Mode::Cycle);
  }
  out.walk_sole_mode = trip_distance_m < kWalkSoleModeMaxM;
  return out;
}

LanguageElement make_language_element(const std::string& pattern) {
  auto regex = parse_regex(pattern);
  return {pattern, regex, compile_dfa(regex)};
}

std::vector<LanguageElement> language_set(const CandidateModeSet& candidates) {
  std::vector<LanguageElement> out;
  if (candidates.walk_sole_mode) out.push_back(make_language_element("w*"));
  if (candidates.modes.count(Mode::Cycle)) {
    out.push_back(make_language_element("c+"));
  }
  out.push_back(make_language_element("w*b+w*"));
  out.push_back(make_language_element("w*s+w*"));
  return out;
}

std::vector<LanguageElement> load_language_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open language file '" + path.string() + "'");
  std::vector<LanguageElement> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(make_language_element(line));
  }
  if (out.empty()) throw EmptyLanguage("language file is empty");
  return out;
}

}  // namespace copter
