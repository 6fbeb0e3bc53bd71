#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>

#include "citits/csv.hpp"
#include "citits/error.hpp"
#include "citits/gateway.hpp"

namespace citits {

namespace {

constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kDigestBytes = 32;

std::string to_hex(const unsigned char* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xF]);
  }
  return out;
}

std::vector<unsigned char> from_hex(const std::string& hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2) throw Error(ErrorCode::BadFormat, "odd-length hex string");
  std::vector<unsigned char> out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::BadFormat, "bad hex digit");
    out.push_back(static_cast<unsigned char>(hi << 4 | lo));
  }
  return out;
}

std::vector<unsigned char> derive(const std::string& password, const std::vector<unsigned char>& salt,
                                  int iterations) {
  std::vector<unsigned char> out(kDigestBytes);
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                        static_cast<int>(salt.size()), iterations, EVP_sha256(),
                        static_cast<int>(out.size()), out.data()) != 1) {
    throw Error(ErrorCode::Io, "password hashing failed");
  }
  return out;
}

}  // namespace

Account AccountStore::register_user(const std::string& username, const std::string& password,
                                    std::int64_t created_at) {
  if (username.empty() || password.empty()) {
    throw Error(ErrorCode::BadFormat, "username and password must be non-empty");
  }
  std::vector<unsigned char> salt(kSaltBytes);
  if (RAND_bytes(salt.data(), static_cast<int>(salt.size())) != 1) {
    throw Error(ErrorCode::Io, "no entropy for salt");
  }
  const auto digest = derive(password, salt, iterations_);
  Account a{username, to_hex(salt.data(), salt.size()), to_hex(digest.data(), digest.size()),
            created_at};

  std::lock_guard lock(mu_);
  const bool taken = std::any_of(accounts_.begin(), accounts_.end(),
                                 [&](const Account& x) { return x.username == username; });
  if (taken) throw Error(ErrorCode::DuplicateUsername, "username already registered");
  accounts_.push_back(a);
  return a;
}

Account AccountStore::authenticate(const std::string& username, const std::string& password) const {
  Account found;
  {
    std::lock_guard lock(mu_);
    const auto it = std::find_if(accounts_.begin(), accounts_.end(),
                                 [&](const Account& x) { return x.username == username; });
    if (it == accounts_.end()) throw Error(ErrorCode::AuthFailed, "authentication failed");
    found = *it;
  }
  const auto expected = from_hex(found.digest_hex);
  const auto actual = derive(password, from_hex(found.salt_hex), iterations_);
  if (expected.size() != actual.size() ||
      CRYPTO_memcmp(expected.data(), actual.data(), actual.size()) != 0) {
    throw Error(ErrorCode::AuthFailed, "authentication failed");
  }
  return found;
}

std::vector<Account> AccountStore::accounts() const {
  std::lock_guard lock(mu_);
  return accounts_;
}

void AccountStore::insert(Account a) {
  std::lock_guard lock(mu_);
  const bool taken = std::any_of(accounts_.begin(), accounts_.end(),
                                 [&](const Account& x) { return x.username == a.username; });
  if (taken) throw Error(ErrorCode::DuplicateUsername, "username already registered");
  accounts_.push_back(std::move(a));
}

namespace {
const std::vector<std::string> kAccountsHeader{"username", "salt", "digest", "created_at"};
}

void write_accounts_csv(const std::filesystem::path& path, const std::vector<Account>& accounts) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(accounts.size());
  for (const auto& a : accounts) {
    rows.push_back({a.username, a.salt_hex, a.digest_hex, std::to_string(a.created_at)});
  }
  csv::write_file(path, kAccountsHeader, rows);
}

std::vector<Account> read_accounts_csv(const std::filesystem::path& path) {
  std::vector<Account> out;
  const auto file = path.filename().string();
  csv::read_file(path, kAccountsHeader, [&](const auto& f, std::size_t line) {
    const auto created = csv::parse_int(f[3]);
    if (f[0].empty() || f[1].empty() || f[2].empty() || !created) {
      throw CorruptRecord(file, line, "incomplete account record");
    }
    out.push_back(Account{f[0], f[1], f[2], *created});
  });
  return out;
}

}  // namespace citits
