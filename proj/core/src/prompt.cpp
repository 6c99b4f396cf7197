#include "gazeload/prompt.hpp"

#include <map>

#include "gazeload/error.hpp"
#include "gazeload/features.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

namespace {

const char kSystemTemplate[] = R"TPL(
## Role
You are an expert in Neuroergonomics and cognitive load assessment using eye-tracking data. 
Your objective is to classify a user's Cognitive Load Level as 'Low', 'Moderate', or 'High' based on 
a {time_window}-second window of gaze features.

## Data Interpretation Guide 
CRITICAL: The input data are Z-Scores (Standard Deviations from the GLOBAL POPULATION baseline).
You must interpret the Magnitude and Direction separately:

1. Magnitude:
   * Near 0.0 (-0.5 to +0.5): Baseline behavior. Normal state.
   * Significant Deviation (> +1.0 or < -1.0): A strong physiological signal.
   * Extreme Deviation (> +2.5 or < -2.5): Very intense event.

2. Direction:
   * Positive (+): Value is Higher/Longer/More Frequent than usual.
   * Negative (-): Value is Lower/Shorter/Suppressed compared to usual.
   * WARNING: A Negative Z-Score does NOT automatically mean "Low Load". In some tasks, "Shorter"
     fixations (Negative Z) often indicate High Load.

## Feature Definitions
* fix_dur: Duration of fixations. (Pos=Long Stare; Neg=Rapid Glances)
* sac_dur: Duration of saccades.
* sac_amp: Amplitude of eye movement. (Pos=Wide Scanning; Neg=Tunnel Vision)
* fix_ratio: Proportion of time spent focusing.
* sac_ratio: Proportion of time spent moving.
* blink_count: Frequency of blinks.
* avg_pupil_size: Average pupil diameter.

## Calibration Protocol (User-Adaptive Logic)
You will be provided with specific Task Logic (Standard Rules) and a User Profile & Calibration
Instructions (Calibration).
1. Standard Rules are concluded based on the global population.
2. User Profile & Calibration Instructions give guidance to adjust some specific guidance in the 
Standard Rules.

## Reference Data Verification Protocol
You will receive Reference Data containing REAL historical examples from similar users. These 
examples are retrieved based on mathematical similarity to the current session feature. You must 
qualitatively validate retrieved examples before using them. Mathematical similarity does not 
guarantee physiological relevance.

## Internal Reasoning Process
Follow this four-phase reasoning process:

Phase 1: Understand User Profile
- Understand the avg_pupil_size and blink_count baselines from the User Profile. Identify the user 
profile type and traits.

Phase 2: Task Logic Application & Calibration
- Step A: Apply the standard rules from the Task Logic section to the Feature Data.
- Step B: ADJUST interpretation based on User Profile & Calibration Instructions.
- Step C: Form a provisional classification based on Task Logic + User Profile.

Phase 3: Reference Data Verification
- Step A (Qualitative Validation): Compare the dominant physiological state (Active, 
Suppressed, or Stable) of Reference Examples against the Current Session. DISCARD any example showing 
a conflicting pattern.
- Step B (Evidence Prioritization): If a validated Reference Example contradicts your Provisional 
Classification, TRUST THE REFERENCE EXAMPLE.
- Step C (Fallback): If Reference Examples fail validation, revert to the Calibrated Task Logic from 
Phase 2.

Phase 4: Final Consistency Reflection
- Cross-validate: Does the conclusion align with User Profile traits? Does it satisfy calibrated
  Task Logic? Is it consistent with validated Reference Examples?
- Conflict Resolution: Prioritize evidence in this order: Validated Reference Examples > Calibrated
  Task Logic > Raw Feature Data.

## Output Requirements
Cognitive Load: [Low/Moderate/High]
Reasoning: brief explanation in few sentences, summarizing how you arrived at the conclusion.
)TPL";

const char kUserTemplate[] = R"TPL(
## Current Session
Task: {task_name}
Time Window: {time_window} seconds

## Task Logic
{task_guidance}

## User Profile & Calibration Instructions
{user_profile_traits}

## Reference Data (Retrieval-Augmented Context)
{rag_context}

## Feature Data (Z-Scores)
{feature_table}

## Request
Based on the Task Logic (Standard), User Profile & Calibration Instructions (Adjust), AND Reference 
Data (Ground Truth Examples) above, classify the cognitive load.

## Output Requirements
Cognitive Load: [Low/Moderate/High]
Reasoning: brief explanation in few sentences, summarizing how you arrived at the conclusion.
)TPL";

// Raw string literals keep a leading newline after the opening marker; the
// accessors strip it so the first template byte is the first content byte.
std::string strip_leading_newline(const char* s) {
  std::string v(s);
  if (!v.empty() && v[0] == '\n') v.erase(0, 1);
  return v;
}

}  // namespace

const std::string& system_prompt_template() {
  static const std::string t = strip_leading_newline(kSystemTemplate);
  return t;
}

const std::string& user_prompt_template() {
  static const std::string t = strip_leading_newline(kUserTemplate);
  return t;
}

namespace {

std::string trim_trailing(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) {
    s.pop_back();
  }
  return s;
}

// Single-pass slot substitution; replacement text is never rescanned.
std::string fill_slots(const std::string& tpl,
                       const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(tpl.size());
  size_t pos = 0;
  while (pos < tpl.size()) {
    const size_t open = tpl.find('{', pos);
    if (open == std::string::npos) {
      out.append(tpl, pos, std::string::npos);
      break;
    }
    const size_t close = tpl.find('}', open);
    bool replaced = false;
    if (close != std::string::npos) {
      const std::string key = tpl.substr(open + 1, close - open - 1);
      auto it = slots.find(key);
      if (it != slots.end()) {
        out.append(tpl, pos, open - pos);
        out += it->second;
        pos = close + 1;
        replaced = true;
      }
    }
    if (!replaced) {
      out.append(tpl, pos, open - pos + 1);
      pos = open + 1;
    }
  }
  return out;
}

std::string profile_description(const std::string& name) {
  if (name == "High-Reactor") {
    return "Strong autonomic pupil response with large pupil variability at "
           "baseline; require larger pupil deviations before judging load "
           "extreme for this user.";
  }
  if (name == "Low-Reactor") {
    return "Naturally reduced gaze and pupil variability; smaller deviations "
           "from baseline may already indicate significant cognitive load "
           "changes for this user.";
  }
  if (name == "Restless") {
    return "Frequent blinking and unstable gaze at baseline; discount blink "
           "and instability signals and weight pupil and fixation evidence "
           "more for this user.";
  }
  return "No named archetype; interpret deviations against the population "
         "baseline with standard thresholds.";
}

}  // namespace

std::string render_task_guidance(const GuidanceRule* rule) {
  if (rule == nullptr) {
    return "No task-specific rule available. Apply the general feature "
           "definitions and the magnitude guide to estimate load.";
  }
  std::string text = trim_trailing(rule->prompt_text);
  if (!rule->transfer_from.empty()) {
    text += "\n(Note: rule transferred from task " + rule->transfer_from + ".)";
  }
  return text;
}

std::string render_profile_block(const UserProfile* profile) {
  if (profile == nullptr) {
    return "No user profile available. Interpret all z-scores against the "
           "global population baseline with standard thresholds.";
  }
  const auto& tn = trait_names();
  std::string out = "Profile Type: " + profile->profile_name + "\n";
  out += "Profile Description: " + profile_description(profile->profile_name) + "\n";
  out += "Traits: ";
  out += tn[kBlinkIntensity] + "=" + format_fixed(profile->traits.values[kBlinkIntensity], 2) +
         " blinks/s; ";
  out += tn[kPupilSensitivity] + "=" +
         format_fixed(profile->traits.values[kPupilSensitivity], 2) + "; ";
  out += tn[kPupilBaseline] + "=" + format_fixed(profile->traits.values[kPupilBaseline], 2) +
         "; ";
  out += tn[kGazeInstability] + "=" +
         format_fixed(profile->traits.values[kGazeInstability], 2) + " deg\n";
  out += "Personalized Baselines: avg_pupil_size=" +
         format_fixed(profile->baselines.pupil_mean, 2) + ", blink_count=" +
         format_fixed(profile->baselines.blink_mean, 2) + " per second\n";
  out += "Calibration Instruction: interpret deviations relative to this "
         "user's personal baselines above, not only the population baseline.";
  return out;
}

std::string render_rag_context(const std::vector<ReferenceExample>& refs) {
  if (refs.empty()) return "No reference examples available.";
  std::string out;
  for (size_t i = 0; i < refs.size(); ++i) {
    if (i > 0) out += "\n";
    out += "### Reference Example " + std::to_string(i + 1) + "\n";
    out += render_markdown(*refs[i].table);
    out += "Label: " + std::string(to_string(refs[i].label)) + "\n";
  }
  return trim_trailing(out);
}

PromptPair assemble_prompts(const PromptContext& context) {
  if (context.table == nullptr) throw InputError("prompt context has no feature table");
  const std::string window_text = std::to_string(context.window);

  PromptPair pair;
  pair.system_text =
      fill_slots(system_prompt_template(), {{"time_window", window_text}});

  std::map<std::string, std::string> slots;
  slots["task_name"] = to_string(context.task);
  slots["time_window"] = window_text;
  slots["task_guidance"] = render_task_guidance(context.rule);
  slots["user_profile_traits"] = render_profile_block(context.profile);
  slots["rag_context"] = render_rag_context(context.refs);
  slots["feature_table"] = trim_trailing(render_markdown(*context.table));
  pair.user_text = fill_slots(user_prompt_template(), slots);
  return pair;
}

}  // namespace gazeload
