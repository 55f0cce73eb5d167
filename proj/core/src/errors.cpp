#include "fsumm/errors.hpp"

namespace fsumm {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::config:
      return 2;
    case Errc::transport:
    case Errc::fixture_miss:
    case Errc::auth:
      return 4;
    case Errc::id_set_mismatch:
      return 5;
    default:
      return 3;
  }
}

MalformedLineError::MalformedLineError(std::size_t line_no,
                                       const std::string& detail)
    : Error(Errc::malformed_line,
            "malformed line " + std::to_string(line_no) + ": " + detail),
      line_no_(line_no) {}

InsufficientHistoryError::InsufficientHistoryError(std::size_t available,
                                                   std::size_t wanted)
    : Error(Errc::insufficient_history,
            "insufficient history: " + std::to_string(available) +
                " strictly earlier sample(s) available, " +
                std::to_string(wanted) + " requested"),
      available_(available) {}

MissingTimestampError::MissingTimestampError(const std::string& id)
    : Error(Errc::missing_timestamp, "sample '" + id + "' has no created_at"),
      id_(id) {}

BudgetExceededError::BudgetExceededError(std::size_t estimated,
                                         std::size_t budget)
    : Error(Errc::budget_exceeded,
            "prompt estimate " + std::to_string(estimated) +
                " tokens exceeds budget of " + std::to_string(budget)),
      estimated_(estimated),
      budget_(budget) {}

FixtureMissError::FixtureMissError(const std::string& prompt_hash)
    : Error(Errc::fixture_miss,
            "no fixture record for prompt_sha256=" + prompt_hash),
      prompt_hash_(prompt_hash) {}

}  // namespace fsumm
