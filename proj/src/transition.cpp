#include "jnel/transition.hpp"

#include <algorithm>

namespace jnel {

TypeInventory::TypeInventory(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
}

std::optional<int> TypeInventory::index_of(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

std::size_t ActionAlphabet::index(Action a) const {
  switch (a.kind) {
    case ActionKind::kShift:
      return 0;
    case ActionKind::kOut:
      return 1;
    case ActionKind::kReduce:
      if (a.type < 0 || static_cast<std::size_t>(a.type) >= types_.size()) {
        throw TransitionError("Reduce with unknown type index " + std::to_string(a.type));
      }
      return 2 + static_cast<std::size_t>(a.type);
  }
  throw TransitionError("invalid action kind");
}

Action ActionAlphabet::action(std::size_t index) const {
  if (index == 0) return Action::shift();
  if (index == 1) return Action::out();
  if (index < size()) return Action::reduce(static_cast<int>(index - 2));
  throw TransitionError("action index " + std::to_string(index) + " out of range");
}

std::string ActionAlphabet::name(Action a) const {
  switch (a.kind) {
    case ActionKind::kShift:
      return "Shift";
    case ActionKind::kOut:
      return "Out";
    case ActionKind::kReduce:
      return "Reduce-" + types_.name(static_cast<std::size_t>(a.type));
  }
  return "?";
}

Action ActionAlphabet::parse(std::string_view name) const {
  if (name == "Shift") return Action::shift();
  if (name == "Out") return Action::out();
  constexpr std::string_view prefix = "Reduce-";
  if (name.substr(0, prefix.size()) == prefix) {
    if (auto t = types_.index_of(name.substr(prefix.size()))) return Action::reduce(*t);
  }
  throw TransitionError("unknown action '" + std::string(name) + "'");
}

// ---- TransitionState ------------------------------------------------------

TransitionState::TransitionState(int sentence_length) : length_(sentence_length) {
  if (sentence_length < 0) throw TransitionError("negative sentence length");
}

std::vector<int> TransitionState::buffer() const {
  std::vector<int> out;
  for (int i = cursor_; i < length_; ++i) out.push_back(i);
  return out;
}

int TransitionState::output_token_count() const {
  int n = 0;
  for (const Chunk& c : output_) n += c.end - c.start;
  return n;
}

bool TransitionState::is_legal(Action a, std::size_t num_types) const {
  switch (a.kind) {
    case ActionKind::kShift:
      return cursor_ < length_;
    case ActionKind::kOut:
      return cursor_ < length_ && stack_.empty();
    case ActionKind::kReduce:
      return !stack_.empty() && a.type >= 0 && static_cast<std::size_t>(a.type) < num_types;
  }
  return false;
}

std::vector<Action> TransitionState::legal_actions(std::size_t num_types) const {
  std::vector<Action> out;
  if (cursor_ < length_) out.push_back(Action::shift());
  if (cursor_ < length_ && stack_.empty()) out.push_back(Action::out());
  if (!stack_.empty()) {
    for (std::size_t t = 0; t < num_types; ++t) out.push_back(Action::reduce(static_cast<int>(t)));
  }
  return out;
}

void TransitionState::apply(Action a, std::size_t num_types) {
  switch (a.kind) {
    case ActionKind::kShift:
      if (cursor_ >= length_) throw TransitionError("Shift requires a nonempty buffer");
      stack_.push_back(cursor_++);
      break;
    case ActionKind::kOut:
      if (cursor_ >= length_) throw TransitionError("Out requires a nonempty buffer");
      if (!stack_.empty()) throw TransitionError("Out requires an empty stack");
      output_.push_back({cursor_, cursor_ + 1, std::nullopt});
      ++cursor_;
      break;
    case ActionKind::kReduce:
      if (stack_.empty()) throw TransitionError("Reduce requires a nonempty stack");
      if (a.type < 0 || static_cast<std::size_t>(a.type) >= num_types) {
        throw TransitionError("Reduce with unknown type index " + std::to_string(a.type));
      }
      output_.push_back({stack_.front(), stack_.back() + 1, a.type});
      stack_.clear();
      break;
  }
  history_.push_back(a);
}

std::optional<std::string> TransitionState::check_invariants() const {
  if (cursor_ < 0 || cursor_ > length_) return "cursor out of range";
  std::vector<int> seen(static_cast<std::size_t>(length_), 0);
  for (int i = cursor_; i < length_; ++i) ++seen[static_cast<std::size_t>(i)];
  for (int t : stack_) {
    if (t < 0 || t >= length_) return "stack token out of range";
    ++seen[static_cast<std::size_t>(t)];
  }
  for (const Chunk& c : output_) {
    if (c.start < 0 || c.end > length_ || c.start >= c.end) return "malformed output chunk";
    if (!c.type && c.end - c.start != 1) return "Out chunk spans more than one token";
    for (int t = c.start; t < c.end; ++t) ++seen[static_cast<std::size_t>(t)];
  }
  for (int count : seen) {
    if (count != 1) return "buffer, stack and output do not partition the sentence";
  }
  for (std::size_t i = 1; i < stack_.size(); ++i) {
    if (stack_[i] != stack_[i - 1] + 1) return "stack tokens are not contiguous";
  }
  if (!stack_.empty() && stack_.back() != cursor_ - 1) return "stack is not adjacent to the buffer";
  if (history_.size() > 2 * static_cast<std::size_t>(length_)) return "more than 2n actions";
  return std::nullopt;
}

std::vector<Action> legal_actions(const TransitionState& state, std::size_t num_types) {
  return state.legal_actions(num_types);
}

TransitionState apply(TransitionState state, Action a, std::size_t num_types) {
  state.apply(a, num_types);
  return state;
}

// ---- oracle ---------------------------------------------------------------

std::vector<Action> oracle_actions(int sentence_length, const std::vector<Span>& gold, const TypeInventory& types) {
  std::vector<Span> spans = gold;
  std::sort(spans.begin(), spans.end());
  int prev_end = 0;
  for (const Span& s : spans) {
    if (s.start < 0 || s.end > sentence_length || s.start >= s.end) {
      throw TransitionError("span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                            ") out of bounds for sentence of length " + std::to_string(sentence_length));
    }
    if (s.start < prev_end) {
      throw TransitionError("overlapping spans at token " + std::to_string(s.start));
    }
    if (!types.index_of(s.type)) throw TransitionError("unknown entity type '" + s.type + "'");
    prev_end = s.end;
  }
  std::vector<Action> actions;
  int cursor = 0;
  for (const Span& s : spans) {
    for (; cursor < s.start; ++cursor) actions.push_back(Action::out());
    for (; cursor < s.end; ++cursor) actions.push_back(Action::shift());
    actions.push_back(Action::reduce(*types.index_of(s.type)));
  }
  for (; cursor < sentence_length; ++cursor) actions.push_back(Action::out());
  return actions;
}

std::vector<Span> spans_of(const TransitionState& state, const TypeInventory& types) {
  std::vector<Span> out;
  for (const Chunk& c : state.output()) {
    if (c.type) out.push_back({c.start, c.end, types.name(static_cast<std::size_t>(*c.type))});
  }
  return out;
}

std::vector<Span> decode_spans(const std::vector<Action>& actions, int sentence_length, const TypeInventory& types) {
  TransitionState state(sentence_length);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (state.terminal()) throw TransitionError("actions continue past the terminal state at step " + std::to_string(i));
    try {
      state.apply(actions[i], types.size());
    } catch (const TransitionError& e) {
      throw TransitionError("illegal action at step " + std::to_string(i) + ": " + e.what());
    }
  }
  if (!state.terminal()) throw TransitionError("action sequence does not reach a terminal state");
  return spans_of(state, types);
}

}  // namespace jnel
