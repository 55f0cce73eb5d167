#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fsumm {

enum class Errc {
  config,
  io,
  malformed_line,
  empty_corpus,
  duplicate_id,
  duplicate_sample,
  bad_timestamp,
  subset_too_large,
  unknown_id,
  not_enough_exemplars,
  insufficient_history,
  missing_timestamp,
  budget_exceeded,
  transport,
  fixture_miss,
  auth,
  empty_reference,
  empty_batch,
  length_mismatch,
  nonpositive_baseline,
  id_set_mismatch,
};

// Process exit codes: 2 config, 3 data, 4 backend, 5 comparison mismatch.
int exit_code_for(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const { return code_; }
  int exit_code() const { return exit_code_for(code_); }

private:
  Errc code_;
};

class MalformedLineError : public Error {
public:
  MalformedLineError(std::size_t line_no, const std::string& detail);
  std::size_t line_no() const { return line_no_; }

private:
  std::size_t line_no_;
};

class InsufficientHistoryError : public Error {
public:
  InsufficientHistoryError(std::size_t available, std::size_t wanted);
  std::size_t available() const { return available_; }

private:
  std::size_t available_;
};

class MissingTimestampError : public Error {
public:
  explicit MissingTimestampError(const std::string& id);
  const std::string& id() const { return id_; }

private:
  std::string id_;
};

class BudgetExceededError : public Error {
public:
  BudgetExceededError(std::size_t estimated, std::size_t budget);
  std::size_t estimated() const { return estimated_; }
  std::size_t budget() const { return budget_; }

private:
  std::size_t estimated_;
  std::size_t budget_;
};

class FixtureMissError : public Error {
public:
  explicit FixtureMissError(const std::string& prompt_hash);
  const std::string& prompt_hash() const { return prompt_hash_; }

private:
  std::string prompt_hash_;
};

}  // namespace fsumm
