#pragma once

#include <string>
#include <vector>

#include "gazeload/llm_client.hpp"
#include "gazeload/profiles.hpp"
#include "gazeload/rules.hpp"
#include "gazeload/types.hpp"

namespace gazeload {

struct ReferenceExample {
  const FeatureTable* table = nullptr;
  Level label = Level::Low;
};

struct PromptContext {
  TaskId task = TaskId::Reading;
  int window = 5;
  const GuidanceRule* rule = nullptr;      // null: generic guidance text
  const UserProfile* profile = nullptr;    // null: population-baseline text
  std::vector<ReferenceExample> refs;      // empty: no-references sentinel
  const FeatureTable* table = nullptr;     // required
};

// The raw templates. The system template has one {time_window} slot; the user
// template has exactly six slots: {task_name}, {time_window}, {task_guidance},
// {user_profile_traits}, {rag_context}, {feature_table}.
const std::string& system_prompt_template();
const std::string& user_prompt_template();

// Deterministic slot renderings.
std::string render_profile_block(const UserProfile* profile);
std::string render_rag_context(const std::vector<ReferenceExample>& refs);
std::string render_task_guidance(const GuidanceRule* rule);

// Fills both templates. Byte-deterministic for identical inputs.
PromptPair assemble_prompts(const PromptContext& context);

}  // namespace gazeload
