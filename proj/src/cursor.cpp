#include "subguard/cursor.hpp"

#include <string>

#include "subguard/text.hpp"

namespace subguard {

namespace {
thread_local CursorAudit* g_audit = nullptr;
}  // namespace

CursorAudit::CursorAudit(std::uint64_t work_limit) : work_limit_(work_limit), previous_(g_audit) {
  g_audit = this;
}

CursorAudit::~CursorAudit() { g_audit = previous_; }

CursorAudit* CursorAudit::current() noexcept { return g_audit; }

void CursorAudit::on_read() {
  ++stats_.reads;
  if (work_limit_ != 0 && stats_.reads > work_limit_) {
    throw WorkBoundExceeded("byte-read work bound of " + std::to_string(work_limit_) + " exceeded");
  }
}

ByteCursor::ByteCursor(std::string_view data) noexcept : data_(data), audit_(g_audit) {
  if (audit_ != nullptr) ++audit_->stats_.cursors;
}

ByteCursor::~ByteCursor() {
  if (audit_ != nullptr && pos_ > data_.size()) ++audit_->stats_.overconsumed;
}

void ByteCursor::count_read() const {
  if (audit_ != nullptr) audit_->on_read();
}

void ByteCursor::fail(const char* what) const {
  if (audit_ != nullptr) audit_->on_violation();
  throw InvariantViolation(std::string("byte cursor: ") + what + " at offset " +
                           std::to_string(pos_) + " of " + std::to_string(data_.size()));
}

char ByteCursor::peek(std::size_t ahead) const {
  count_read();
  if (ahead >= remaining()) fail("read past end");
  return data_[pos_ + ahead];
}

char ByteCursor::peek_or_nul(std::size_t ahead) const {
  count_read();
  return ahead < remaining() ? data_[pos_ + ahead] : '\0';
}

char ByteCursor::next() {
  char c = peek();
  ++pos_;
  return c;
}

void ByteCursor::advance(std::size_t n) {
  count_read();
  if (n > remaining()) fail("advance past end");
  pos_ += n;
}

void ByteCursor::seek(std::size_t absolute) {
  count_read();
  if (absolute > data_.size()) fail("seek past end");
  if (absolute < pos_) fail("seek backwards");
  pos_ = absolute;
}

std::string_view ByteCursor::slice(std::size_t from, std::size_t to) const {
  if (from > to || to > data_.size()) fail("slice out of range");
  return data_.substr(from, to - from);
}

bool ByteCursor::starts_with(std::string_view prefix) const noexcept {
  return rest().substr(0, prefix.size()) == prefix;
}

bool ByteCursor::starts_with_icase(std::string_view prefix) const noexcept {
  return text::istarts_with(rest(), prefix);
}

}  // namespace subguard
