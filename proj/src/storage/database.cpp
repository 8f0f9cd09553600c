#include "signcrowd/storage/database.hpp"

#include <sqlite3.h>

#include "signcrowd/error.hpp"

namespace signcrowd {

namespace {

[[noreturn]] void fail(sqlite3* db, std::string_view what) {
    throw Error(ErrorCode::Store, std::string(what) + ": " + (db ? sqlite3_errmsg(db) : "no handle"));
}

}  // namespace

Statement::Statement(sqlite3* db, std::string_view sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK) {
        fail(db, "prepare");
    }
}

Statement::~Statement() { sqlite3_finalize(stmt_); }

Statement::Statement(Statement&& other) noexcept : db_(other.db_), stmt_(other.stmt_) {
    other.stmt_ = nullptr;
}

Statement& Statement::bind(int index, std::string_view value) {
    if (sqlite3_bind_text(stmt_, index, value.data(), static_cast<int>(value.size()), SQLITE_TRANSIENT) !=
        SQLITE_OK) {
        fail(db_, "bind");
    }
    return *this;
}

Statement& Statement::bind(int index, std::int64_t value) {
    if (sqlite3_bind_int64(stmt_, index, value) != SQLITE_OK) fail(db_, "bind");
    return *this;
}

Statement& Statement::bind(int index, double value) {
    if (sqlite3_bind_double(stmt_, index, value) != SQLITE_OK) fail(db_, "bind");
    return *this;
}

Statement& Statement::bind(int index, std::nullopt_t) {
    if (sqlite3_bind_null(stmt_, index) != SQLITE_OK) fail(db_, "bind");
    return *this;
}

bool Statement::step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    if (rc == SQLITE_CONSTRAINT) {
        throw Error(ErrorCode::Conflict, sqlite3_errmsg(db_));
    }
    fail(db_, "step");
}

std::int64_t Statement::column_int(int col) const { return sqlite3_column_int64(stmt_, col); }

double Statement::column_double(int col) const { return sqlite3_column_double(stmt_, col); }

std::string Statement::column_text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    const int n = sqlite3_column_bytes(stmt_, col);
    return p ? std::string(p, static_cast<std::size_t>(n)) : std::string();
}

std::optional<std::string> Statement::column_opt_text(int col) const {
    if (column_null(col)) return std::nullopt;
    return column_text(col);
}

std::optional<std::int64_t> Statement::column_opt_int(int col) const {
    if (column_null(col)) return std::nullopt;
    return column_int(col);
}

bool Statement::column_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }

Connection::Connection(const std::filesystem::path& path) {
    constexpr int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_NOMUTEX;
    if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
        const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(ErrorCode::Store, "cannot open " + path.string() + ": " + msg);
    }
    sqlite3_busy_timeout(db_, 15000);
    exec("PRAGMA journal_mode=WAL");
    exec("PRAGMA synchronous=NORMAL");
    exec("PRAGMA foreign_keys=ON");
}

Connection::~Connection() { sqlite3_close(db_); }

void Connection::exec(std::string_view sql) {
    char* err = nullptr;
    const std::string text(sql);
    if (sqlite3_exec(db_, text.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        const std::string msg = err ? err : "unknown";
        sqlite3_free(err);
        throw Error(ErrorCode::Store, msg);
    }
}

Statement Connection::prepare(std::string_view sql) {
    if (statement_hook != nullptr && *statement_hook) (*statement_hook)(sql);
    return Statement(db_, sql);
}

int Connection::changes() const { return sqlite3_changes(db_); }

Database::Database(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path_.parent_path(), ec);
    }
    acquire();  // fail fast on an unusable path
}

Database::~Database() = default;

Database::Lease Database::acquire() {
    std::unique_ptr<Connection> conn;
    {
        std::lock_guard lock(mutex_);
        if (!idle_.empty()) {
            conn = std::move(idle_.back());
            idle_.pop_back();
        }
    }
    if (!conn) {
        conn = std::make_unique<Connection>(path_);
        conn->statement_hook = &hook_;
    }
    return Lease(conn.release(), Release{this});
}

void Database::release(Connection* c) {
    std::lock_guard lock(mutex_);
    idle_.emplace_back(c);
}

void Database::begin(Connection& c, const char* mode) { c.exec(mode); }

void Database::set_statement_hook(std::function<void(std::string_view)> hook) {
    std::lock_guard lock(mutex_);
    hook_ = std::move(hook);
}

}  // namespace signcrowd
