#include "signcrowd/assignment/assignment.hpp"

#include <algorithm>

namespace signcrowd {

namespace {

bool recorded_by(const World& world, const std::string& prompt_id, const std::string& user_id) {
    return std::any_of(world.recordings.begin(), world.recordings.end(), [&](const RecordingFacts& r) {
        return r.prompt_id == prompt_id && r.signer_id == user_id;
    });
}

std::size_t recordings_of(const World& world, const std::string& prompt_id) {
    return static_cast<std::size_t>(std::count_if(
        world.recordings.begin(), world.recordings.end(), [&](const RecordingFacts& r) {
            return r.prompt_id == prompt_id && r.state != LifecycleState::VideoRejected;
        }));
}

}  // namespace

Role required_role(TaskKind kind) {
    switch (kind) {
        case TaskKind::Record: return Role::Contributor;
        case TaskKind::ValidateVideo: return Role::Validator;
        case TaskKind::Annotate: return Role::Annotator;
        case TaskKind::ValidateAnnotation: return Role::Validator;
    }
    return Role::Admin;
}

LifecycleState queue_state(TaskKind kind) {
    switch (kind) {
        case TaskKind::ValidateVideo: return LifecycleState::PendingVideoValidation;
        case TaskKind::Annotate: return LifecycleState::PendingAnnotation;
        case TaskKind::ValidateAnnotation: return LifecycleState::PendingAnnotationValidation;
        case TaskKind::Record: break;
    }
    throw Error(ErrorCode::BadRequest, "record tasks have no queue state");
}

bool is_eligible(const UserProfile& user, const TaskItem& item, TaskKind kind, const World& world,
                 const AssignmentOptions& options) {
    if (kind == TaskKind::Record) {
        const auto* prompt = std::get_if<Prompt>(&item);
        if (prompt == nullptr || prompt->language != user.selected_language) return false;
        return options.allow_repeat_recordings || !recorded_by(world, prompt->id, user.id);
    }
    const auto* rec = std::get_if<RecordingFacts>(&item);
    if (rec == nullptr || rec->language != user.selected_language) return false;
    if (rec->state != queue_state(kind)) return false;
    switch (kind) {
        case TaskKind::ValidateVideo:
            return rec->signer_id != user.id && !rec->current_round_voters.contains(user.id);
        case TaskKind::ValidateAnnotation:
            return rec->signer_id != user.id && rec->annotator_id != user.id;
        default:
            return true;
    }
}

std::vector<TaskItem> candidate_pool(const UserProfile& user, TaskKind kind, const World& world,
                                     const AssignmentOptions& options) {
    std::vector<TaskItem> pool;
    if (kind == TaskKind::Record) {
        for (const auto& p : world.prompts) {
            TaskItem item{p};
            if (is_eligible(user, item, kind, world, options)) pool.push_back(std::move(item));
        }
    } else {
        for (const auto& r : world.recordings) {
            TaskItem item{r};
            if (is_eligible(user, item, kind, world, options)) pool.push_back(std::move(item));
        }
    }
    return pool;
}

std::optional<TaskItem> select_item(const std::vector<TaskItem>& pool, std::mt19937_64& rng, const World& world,
                                    AssignmentPolicy policy) {
    if (pool.empty()) return std::nullopt;
    if (policy == AssignmentPolicy::CoverageWeighted) {
        std::vector<std::size_t> least;
        std::size_t best = SIZE_MAX;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const auto* p = std::get_if<Prompt>(&pool[i]);
            const auto n = p ? recordings_of(world, p->id) : 0;
            if (n < best) {
                best = n;
                least.clear();
            }
            if (n == best) least.push_back(i);
        }
        std::uniform_int_distribution<std::size_t> pick(0, least.size() - 1);
        return pool[least[pick(rng)]];
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return pool[pick(rng)];
}

std::optional<TaskItem> pick_task_item(const UserProfile& user, TaskKind kind, const World& world,
                                       std::mt19937_64& rng, const AssignmentOptions& options) {
    if (!user.roles.has(required_role(kind))) {
        throw Error(ErrorCode::Role, "user lacks the " + std::string(to_string(required_role(kind))) + " role");
    }
    return select_item(candidate_pool(user, kind, world, options), rng, world, options.policy);
}

Assigner::Assigner(Database& db, AssignmentOptions options, Clock clock)
    : db_(db), options_(options), clock_(std::move(clock)) {}

World Assigner::load_world(Connection& c, const UserProfile& user) {
    World world;
    world.prompts = repo::prompts_in_language(c, user.selected_language);
    const auto voted = repo::voted_recordings(c, user.id);
    const std::set<std::string> voted_set(voted.begin(), voted.end());
    for (const auto& r : repo::recordings(c, user.selected_language)) {
        RecordingFacts f{r.id, r.prompt_id, user.selected_language, r.signer_id, r.annotator_id, r.state, {}};
        if (voted_set.contains(r.id)) f.current_round_voters.insert(user.id);
        world.recordings.push_back(std::move(f));
    }
    return world;
}

std::optional<Task> Assigner::next_task(const UserProfile& user, TaskKind kind, std::optional<std::uint64_t> rng_seed) {
    std::mt19937_64 rng(rng_seed ? *rng_seed : std::random_device{}());
    return db_.read([&](Connection& c) -> std::optional<Task> {
        const auto world = load_world(c, user);
        const auto item = pick_task_item(user, kind, world, rng, options_);
        if (!item) return std::nullopt;

        Task task;
        task.kind = kind;
        task.issued_at_ms = clock_();
        task.lease_ttl_s = options_.lease_ttl_s;
        if (const auto* p = std::get_if<Prompt>(&*item)) {
            task.prompt = *p;
        } else {
            const auto& facts = std::get<RecordingFacts>(*item);
            task.recording = repo::find_recording(c, facts.id);
            task.prompt = repo::find_prompt(c, facts.prompt_id).value();
            if (!task.recording) return std::nullopt;
        }
        return task;
    });
}

}  // namespace signcrowd
