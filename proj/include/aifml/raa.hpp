// raa.hpp : utterance-scoring state machine of the robotic assistant agent,
// plus per-session and per-team statistics.
//
// A score above the threshold is a correct recognition and resets the
// partial-attempt counter (PAIRC). Anything else bumps the counter and the
// agent answers "Try Again." until the counter reaches three, then
// "Cheer Up.".

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aifml {

inline constexpr std::string_view kCongratsMessage = "Congratulations! You are great.";
inline constexpr std::string_view kTryAgainMessage = "Try Again.";
inline constexpr std::string_view kCheerUpMessage = "Cheer Up.";

enum class Recognition { Correct, Partial };

std::string_view to_string(Recognition recognition);
Recognition recognition_from_string(std::string_view text);

struct RaaError : std::runtime_error {
  enum class Kind { ScoreOutOfRange, StudentMismatch, EmptySession, BadLog };
  Kind kind;
  RaaError(Kind k, const std::string& message) : std::runtime_error(message), kind(k) {}
};

struct Utterance {
  std::string student_id;
  std::string sentence_id;
  double fuzzy_score = 0;  // in [0,1]
  std::int64_t timestamp_ms = 0;
};

struct RAAOutcome {
  Recognition recognition = Recognition::Partial;
  std::string message;
  int pairc_after = 0;
  bool operator==(const RAAOutcome&) const = default;
};

struct RaaConfig {
  double threshold = 0.5;  // strict: a score equal to the threshold is partial
  // When true (default) PAIRC is bumped before the 3-threshold comparison,
  // so the third consecutive partial attempt already hears "Cheer Up.".
  bool count_current_attempt = true;
};

struct RAASession {
  std::string student_id;
  int pairc = 0;  // consecutive partially-recognized count
  std::vector<std::pair<Utterance, RAAOutcome>> history;
  double accumulated_score = 0;
  int correct_count = 0;
  int partial_count = 0;
};

// Atomic transition on one session; the outcome is also appended to history.
RAAOutcome evaluate(RAASession& session, const Utterance& utterance, const RaaConfig& config = {});

struct SessionStats {
  double average_score = 0;
  int correct_count = 0;
  int partial_count = 0;
  double accumulated_score = 0;
};

SessionStats session_stats(const RAASession& session);

struct TeamStats {
  std::string team_id;
  double average_score = 0;
  int correct_count = 0;
  int partial_count = 0;
};

// Per-team rows plus an overall row whose average is the mean of the team
// averages and whose counts are the column sums.
struct TeamReport {
  std::vector<TeamStats> teams;
  TeamStats overall;
};

// --- session log -------------------------------------------------------------
// CSV columns: student_id,team_id,sentence_id,fuzzy_score,recognition,message,
// pairc_after,timestamp_ms. Message strings are quoted verbatim.

struct SessionLogRow {
  std::string student_id;
  std::string team_id;
  std::string sentence_id;
  double fuzzy_score = 0;
  Recognition recognition = Recognition::Partial;
  std::string message;
  int pairc_after = 0;
  std::int64_t timestamp_ms = 0;
  bool operator==(const SessionLogRow&) const = default;
};

void write_session_log(std::ostream& os, const std::vector<SessionLogRow>& rows);
std::string session_log_to_string(const std::vector<SessionLogRow>& rows);
std::vector<SessionLogRow> read_session_log(std::istream& is);
std::vector<SessionLogRow> parse_session_log(std::string_view text);

TeamReport team_report(const std::vector<SessionLogRow>& rows);

// Feeds every row of one student back through evaluate; throws BadLog if the
// stored outcomes cannot be reproduced.
RAASession replay_session(const std::vector<SessionLogRow>& rows, const std::string& student_id,
                          const RaaConfig& config = {});

}  // namespace aifml
