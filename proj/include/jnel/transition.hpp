#pragma once
// Shift / Out / Reduce-<type> transition system for mention detection.
//
//   Shift       moves the next buffer token onto the stack
//   Out         moves the next buffer token to the output as a non-entity
//   Reduce-T    pops the whole stack into the output as one chunk of type T
//
// Out requires an empty stack; Reduce requires a nonempty stack.

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jnel {

class TransitionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Sorted, deduplicated list of entity type labels (e.g. LOC, MISC, ORG, PER).
class TypeInventory {
 public:
  TypeInventory() = default;
  explicit TypeInventory(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<int> index_of(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const TypeInventory&, const TypeInventory&) = default;

 private:
  std::vector<std::string> names_;
};

enum class ActionKind : std::uint8_t { kShift = 0, kOut = 1, kReduce = 2 };

struct Action {
  ActionKind kind = ActionKind::kShift;
  int type = -1;  // index into the TypeInventory, set iff kind == kReduce

  static Action shift() { return {ActionKind::kShift, -1}; }
  static Action out() { return {ActionKind::kOut, -1}; }
  static Action reduce(int type) { return {ActionKind::kReduce, type}; }

  friend auto operator<=>(const Action&, const Action&) = default;
};

// Canonical ordering of the action alphabet: Shift, Out, Reduce-T for each
// type in inventory order. Its size is 2 + |types|.
class ActionAlphabet {
 public:
  explicit ActionAlphabet(TypeInventory types) : types_(std::move(types)) {}

  std::size_t size() const { return 2 + types_.size(); }
  std::size_t index(Action a) const;
  Action action(std::size_t index) const;
  std::string name(Action a) const;
  Action parse(std::string_view name) const;
  const TypeInventory& types() const { return types_; }

 private:
  TypeInventory types_;
};

struct Span {
  int start = 0;  // inclusive
  int end = 0;    // exclusive
  std::string type;

  friend auto operator<=>(const Span&, const Span&) = default;
};

// A completed output element: a typed chunk, or a single Out token.
struct Chunk {
  int start = 0;
  int end = 0;
  std::optional<int> type;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

class TransitionState {
 public:
  explicit TransitionState(int sentence_length);

  int sentence_length() const { return length_; }
  // Tokens not yet consumed, front first.
  std::vector<int> buffer() const;
  int buffer_size() const { return length_ - cursor_; }
  int next_token() const { return cursor_; }
  const std::vector<int>& stack() const { return stack_; }
  const std::vector<Chunk>& output() const { return output_; }
  const std::vector<Action>& history() const { return history_; }
  int cursor() const { return cursor_; }
  int output_token_count() const;

  bool terminal() const { return cursor_ == length_ && stack_.empty(); }
  bool is_legal(Action a, std::size_t num_types) const;
  // Legal actions in canonical alphabet order; empty iff terminal.
  std::vector<Action> legal_actions(std::size_t num_types) const;

  // Throws TransitionError naming the violated rule.
  void apply(Action a, std::size_t num_types);

  // Empty when every structural invariant holds, else a description.
  std::optional<std::string> check_invariants() const;

 private:
  int length_;
  int cursor_ = 0;
  std::vector<int> stack_;
  std::vector<Chunk> output_;
  std::vector<Action> history_;
};

std::vector<Action> legal_actions(const TransitionState& state, std::size_t num_types);
TransitionState apply(TransitionState state, Action a, std::size_t num_types);

// Gold action sequence for a sentence with non-overlapping typed spans.
std::vector<Action> oracle_actions(int sentence_length, const std::vector<Span>& gold, const TypeInventory& types);

// Replays a complete action sequence and returns the typed spans it builds.
std::vector<Span> decode_spans(const std::vector<Action>& actions, int sentence_length, const TypeInventory& types);

// Spans typed by inventory name, in output order.
std::vector<Span> spans_of(const TransitionState& state, const TypeInventory& types);

}  // namespace jnel
