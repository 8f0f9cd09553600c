#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "signcrowd/core/recording.hpp"
#include "signcrowd/core/types.hpp"
#include "signcrowd/storage/database.hpp"
#include "signcrowd/storage/repository.hpp"

namespace signcrowd {

enum class TaskKind { Record, ValidateVideo, Annotate, ValidateAnnotation };

template <>
struct EnumNames<TaskKind> {
    static constexpr std::array names{
        std::pair{TaskKind::Record, std::string_view{"record"}},
        std::pair{TaskKind::ValidateVideo, std::string_view{"validate-video"}},
        std::pair{TaskKind::Annotate, std::string_view{"annotate"}},
        std::pair{TaskKind::ValidateAnnotation, std::string_view{"validate-annotation"}},
    };
};

Role required_role(TaskKind kind);

/// Lifecycle state a recording must be in to be offered for `kind`.
LifecycleState queue_state(TaskKind kind);

struct Task {
    TaskKind kind = TaskKind::Record;
    Prompt prompt;
    std::optional<Recording> recording;  // absent for Record
    Millis issued_at_ms = 0;
    int lease_ttl_s = 900;
};

enum class AssignmentPolicy { Uniform, CoverageWeighted };

template <>
struct EnumNames<AssignmentPolicy> {
    static constexpr std::array names{
        std::pair{AssignmentPolicy::Uniform, std::string_view{"uniform"}},
        std::pair{AssignmentPolicy::CoverageWeighted, std::string_view{"coverage_weighted"}},
    };
};

struct AssignmentOptions {
    bool allow_repeat_recordings = false;
    AssignmentPolicy policy = AssignmentPolicy::Uniform;
    int lease_ttl_s = 900;
};

/// What eligibility needs to know about a recording.
struct RecordingFacts {
    std::string id;
    std::string prompt_id;
    std::string language;
    std::string signer_id;
    std::optional<std::string> annotator_id;
    LifecycleState state = LifecycleState::PendingVideoValidation;
    std::set<std::string> current_round_voters;
};

/// Consistent view of prompts and recordings that a selection runs against.
struct World {
    std::vector<Prompt> prompts;
    std::vector<RecordingFacts> recordings;
};

using TaskItem = std::variant<Prompt, RecordingFacts>;

/// True iff `item` belongs to the candidate pool for (user, kind).
bool is_eligible(const UserProfile& user, const TaskItem& item, TaskKind kind, const World& world,
                 const AssignmentOptions& options = {});

/// Every eligible item for (user, kind), in world order.
std::vector<TaskItem> candidate_pool(const UserProfile& user, TaskKind kind, const World& world,
                                     const AssignmentOptions& options = {});

/// Picks one pool item: uniform, or fewest-recordings-first with a random tie-break.
std::optional<TaskItem> select_item(const std::vector<TaskItem>& pool, std::mt19937_64& rng,
                                    const World& world, AssignmentPolicy policy = AssignmentPolicy::Uniform);

/// Pure selection over a world. Throws E_ROLE when the user lacks the kind's role.
std::optional<TaskItem> pick_task_item(const UserProfile& user, TaskKind kind, const World& world,
                                       std::mt19937_64& rng, const AssignmentOptions& options = {});

/// Serves tasks from the database. Tasks are leases: the same item may be
/// offered to several users; the workflow engine settles races.
class Assigner {
public:
    Assigner(Database& db, AssignmentOptions options, Clock clock = system_now_ms);

    std::optional<Task> next_task(const UserProfile& user, TaskKind kind,
                                  std::optional<std::uint64_t> rng_seed = std::nullopt);

    /// Snapshot of the user's language slice, as used by next_task.
    World load_world(Connection& c, const UserProfile& user);

private:
    Database& db_;
    AssignmentOptions options_;
    Clock clock_;
};

}  // namespace signcrowd
