#include "aifml/raa.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "aifml/detail/csv.hpp"

namespace aifml {

std::string_view to_string(Recognition recognition) {
  return recognition == Recognition::Correct ? "correctly_recognized" : "partially_recognized";
}

Recognition recognition_from_string(std::string_view text) {
  if (text == "correctly_recognized") return Recognition::Correct;
  if (text == "partially_recognized") return Recognition::Partial;
  throw RaaError(RaaError::Kind::BadLog, "unknown recognition value '" + std::string(text) + "'");
}

RAAOutcome evaluate(RAASession& session, const Utterance& utterance, const RaaConfig& config) {
  if (!(utterance.fuzzy_score >= 0.0 && utterance.fuzzy_score <= 1.0))
    throw RaaError(RaaError::Kind::ScoreOutOfRange,
                   "fuzzy score must lie in [0,1], got " + std::to_string(utterance.fuzzy_score));
  if (utterance.student_id != session.student_id)
    throw RaaError(RaaError::Kind::StudentMismatch,
                   "utterance from '" + utterance.student_id + "' fed to session of '" +
                       session.student_id + "'");

  RAAOutcome outcome;
  if (utterance.fuzzy_score > config.threshold) {
    outcome.recognition = Recognition::Correct;
    outcome.message = std::string(kCongratsMessage);
    session.pairc = 0;
    session.correct_count += 1;
  } else {
    outcome.recognition = Recognition::Partial;
    if (config.count_current_attempt) {
      session.pairc += 1;
      outcome.message = std::string(session.pairc < 3 ? kTryAgainMessage : kCheerUpMessage);
    } else {
      outcome.message = std::string(session.pairc < 3 ? kTryAgainMessage : kCheerUpMessage);
      session.pairc += 1;
    }
    session.partial_count += 1;
  }
  outcome.pairc_after = session.pairc;
  session.accumulated_score += utterance.fuzzy_score;
  session.history.emplace_back(utterance, outcome);
  return outcome;
}

SessionStats session_stats(const RAASession& session) {
  if (session.history.empty())
    throw RaaError(RaaError::Kind::EmptySession,
                   "session of '" + session.student_id + "' has no utterances");
  SessionStats stats;
  stats.correct_count = session.correct_count;
  stats.partial_count = session.partial_count;
  stats.accumulated_score = session.accumulated_score;
  stats.average_score = session.accumulated_score / static_cast<double>(session.history.size());
  return stats;
}

void write_session_log(std::ostream& os, const std::vector<SessionLogRow>& rows) {
  os << "student_id,team_id,sentence_id,fuzzy_score,recognition,message,pairc_after,timestamp_ms\n";
  for (const auto& row : rows) {
    os << detail::csv_field(row.student_id) << ',' << detail::csv_field(row.team_id) << ','
       << detail::csv_field(row.sentence_id) << ',' << detail::csv_number(row.fuzzy_score) << ','
       << to_string(row.recognition) << ',' << detail::csv_field(row.message) << ','
       << row.pairc_after << ',' << row.timestamp_ms << '\n';
  }
}

std::string session_log_to_string(const std::vector<SessionLogRow>& rows) {
  std::ostringstream os;
  write_session_log(os, rows);
  return os.str();
}

namespace {

std::int64_t parse_int(const std::string& field, const char* what) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw RaaError(RaaError::Kind::BadLog, std::string("bad ") + what + " '" + field + "'");
  return value;
}

double parse_double(const std::string& field, const char* what) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw RaaError(RaaError::Kind::BadLog, std::string("bad ") + what + " '" + field + "'");
  return value;
}

}  // namespace

std::vector<SessionLogRow> parse_session_log(std::string_view text) {
  const std::vector<std::vector<std::string>> records = detail::parse_csv(text);
  if (records.empty()) throw RaaError(RaaError::Kind::BadLog, "session log is empty");
  const std::vector<std::string> expected = {"student_id", "team_id",     "sentence_id",
                                             "fuzzy_score", "recognition", "message",
                                             "pairc_after", "timestamp_ms"};
  if (records.front() != expected)
    throw RaaError(RaaError::Kind::BadLog, "session log header does not match the schema");

  std::vector<SessionLogRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& fields = records[i];
    if (fields.size() != expected.size())
      throw RaaError(RaaError::Kind::BadLog,
                     "row " + std::to_string(i) + " has " + std::to_string(fields.size()) +
                         " fields, expected " + std::to_string(expected.size()));
    SessionLogRow row;
    row.student_id = fields[0];
    row.team_id = fields[1];
    row.sentence_id = fields[2];
    row.fuzzy_score = parse_double(fields[3], "fuzzy_score");
    row.recognition = recognition_from_string(fields[4]);
    row.message = fields[5];
    row.pairc_after = static_cast<int>(parse_int(fields[6], "pairc_after"));
    row.timestamp_ms = parse_int(fields[7], "timestamp_ms");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SessionLogRow> read_session_log(std::istream& is) {
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse_session_log(buffer.str());
}

TeamReport team_report(const std::vector<SessionLogRow>& rows) {
  if (rows.empty())
    throw RaaError(RaaError::Kind::EmptySession, "cannot report on an empty session log");

  struct Accumulator {
    double total = 0;
    int utterances = 0;
    int correct = 0;
    int partial = 0;
  };
  std::map<std::string, Accumulator> teams;
  for (const auto& row : rows) {
    Accumulator& acc = teams[row.team_id];
    acc.total += row.fuzzy_score;
    acc.utterances += 1;
    (row.recognition == Recognition::Correct ? acc.correct : acc.partial) += 1;
  }

  TeamReport report;
  report.overall.team_id = "overall";
  double average_sum = 0;
  for (const auto& [team_id, acc] : teams) {
    TeamStats stats;
    stats.team_id = team_id;
    stats.average_score = acc.total / acc.utterances;
    stats.correct_count = acc.correct;
    stats.partial_count = acc.partial;
    average_sum += stats.average_score;
    report.overall.correct_count += acc.correct;
    report.overall.partial_count += acc.partial;
    report.teams.push_back(std::move(stats));
  }
  report.overall.average_score = average_sum / static_cast<double>(report.teams.size());
  return report;
}

RAASession replay_session(const std::vector<SessionLogRow>& rows, const std::string& student_id,
                          const RaaConfig& config) {
  RAASession session;
  session.student_id = student_id;
  for (const auto& row : rows) {
    if (row.student_id != student_id) continue;
    Utterance utterance{row.student_id, row.sentence_id, row.fuzzy_score, row.timestamp_ms};
    const RAAOutcome outcome = evaluate(session, utterance, config);
    if (outcome.recognition != row.recognition || outcome.message != row.message ||
        outcome.pairc_after != row.pairc_after)
      throw RaaError(RaaError::Kind::BadLog,
                     "stored outcome for student '" + student_id + "' sentence '" +
                         row.sentence_id + "' does not match the replayed transition");
  }
  return session;
}

}  // namespace aifml
