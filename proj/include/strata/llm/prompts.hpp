#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "strata/core/error.hpp"

namespace strata::llm {

struct PromptTemplate {
  std::string name;
  std::string body;
  std::vector<std::string> required_slots;
};

// ---------------------------------------------------------------------------
// Template bodies. Placeholders are written {slot}; literal braces elsewhere
// (JSON sketches) are left untouched by render().
// ---------------------------------------------------------------------------

inline constexpr const char* kNlPlanBody =
    R"PROMPT(You are an intelligent assistant helping a user complete a task on a web page.

First, reflect step-by-step:
1. What is the user trying to accomplish?
2. What subgoals must be achieved?
3. Can each subgoal be broken into lower-level actions (click, type, etc.)?
4. Are these steps reusable and modular across different pages?

Then output your response in this strict format:

Explanation:
Your reasoning for proposing the high-level plan in 2-3 sentences.

Proposed high-level plan:
1. Step one
2. Step two
...

Rules:
- Do NOT use markdown formatting.
- Assume the user is on the homepage of the website. Do not propose navigating to the homepage as your first action.
- Make sure each step is atomic, reusable, and task-driven.
- Focus on clarity, reusability, and structure.
- Make sure each step is a high-level skill that can be decomposed into low-level actions and this used to achieve a subgoal needed to achieve the task.
- Do not use dummy credentials to log in. Unless explicitly asked to do so as part of the task, and credentials are provided, then you should not propose to sign in.
- Do not use dummy inputs. If you do not know the inputs, then you need to find a new action.
- You are not allowed to make up specific links.
- Make sure each action is atomic and reusable.
- Keep the actions at a high level. Do not make up any details about the parameters when you instantiate actions (i.e. if you expect that search results are to be displayed, do not "imagine" an item in the search results and use that as input. Similarly do not make up links, etc.).

Here is an example of a bad high-level plan for Task: "Find the cheapest red t-shirt".

High level plan:

Login with example uname and password
Select "Nike Red T-Shirt 330"

Why this is a bad plan:
- This attempts to log in despite the task not asking for it.
- The search result is too specific and is hallucinated.
- If the value is unknown, the action should be abstracted or omitted.

A good example of a high-level plan for the same task is:

High level plan:

Search for "red t-shirt"
Filter by price "low"
Select top result

Task: {task}
Webpage: {web_page}
)PROMPT";

inline constexpr const char* kPddlPlanBody =
    R"PROMPT(You are a planning assistant generating a high-level plan for a user completing a task on a web page.

You need to propose a high level plan for the task. The high level plan should be a list of PDDL actions that can be performed on the website to achieve the task.

Only Output the reasoning followed by the high level plan, and nothing else. Please follow the format of the example exactly. Each line should be a PDDL action instantiation.

Explanation:
- Why each action is needed along with a step by step explanation of how the subgoals contribute to achieving the task.
- Clarify what each action does.
- Comment on reusability across pages.
- Mention any assumptions made about the DOM or user context.
- Do not use markdown formatting.

High Level Plan:
1. (search_product "iphone")
2. (filter_by_price "low")
...

Rules: You cannot break any of the following rules.
- Your plan should be consistent, and complete. It should be a high-level set of steps that if executed, will achieve the task.
- Do not use markdown formatting.
- Do not use dummy credentials to log in. Unless explicitly asked to do so as part of the task, and credentials are provided, then you should not propose to sign in.
- Do not use dummy inputs. If you do not know the inputs, then you need to find a new action.
- You are also not allowed to instantiate actions with unknown inputs (for example, (login ?username ?password) or (search ?query) are not allowed as high-level steps in the high-level plan).
- You are not allowed to use links as inputs to actions.
- Assume the user is on the homepage of the website. Do not propose navigating to the homepage as your first action. on-homepage is a precondition that is true at the initial state of the task.
- Make sure each action is atomic and reusable.
- Make sure each step is a high-level skill that can be decomposed into low-level actions and thus used to achieve a subgoal needed to achieve the task.
- Keep the actions at a high level. Do not make up any details about the parameters when you instantiate actions (i.e. if you expect that search results are to be displayed, do not "imagine" an item in the search results and use that as input. Similarly do not make up links, etc.).

Here is an example of a bad high-level plan for Task: "Find the cheapest red t-shirt"

High level plan:

1. (login "example uname", "example psswd")
2. (select "Nike Red T-Shirt 330")

Why this is a bad plan:
- This attempts to log in despite the task not asking for it.
- The search result is too specific and is hallucinated.
- If the value is unknown, the action should be abstracted or omitted.

A good example of a high-level plan for the same task is:

High level plan:

1. (search "red t-shirt")
2. (filter_by_price "low")
3. (select_top_result)

Below is the task to be accomplished and the web page content:
Task: {task}
Web page content: {web_page}
)PROMPT";

inline constexpr const char* kPddlDomainBody =
    R"PROMPT(You are given a high level plan in PDDL-like format. Generate a domain file for the high level plan.
You need to generate a domain file for the high level plan. The domain file should be a list of PDDL action templates that describe the proposed plan.

The task is: {task}
The high level plan is: {high_level_plan}

The domain file should be a list of PDDL action templates that describe the instantiations in the high level plan.

Your output should follow the format below exactly. The explanation should come before the answer, and you should use it to explain your reasoning before generating the domain file.

Explanation:
- Why you chose the preconditions and effects for each action.
- Why you chose the parameters for each action.
- What each action does.

Domain File:

(:action login
    :parameters (?u - username ?p - password)
    :precondition (and (on-login-page)
    (not (logged-in)))
    :effect (and (logged-in))
(:action search_product
    :parameters (?query - string)
    :precondition (and (logged-in))
    :effect (and (search-results-visible))
...

RULES: You cannot break any of the following rules:

- You cannot use markdown formatting.
- The domain file should ensure that the high level plan is consistent. The domain file should be written so that no action in the high level plan is called before its preconditions are met. You should make sure that the high level plan is consistent.
- Executing an action satisfies its effects.
- The initial state of the high level plan is the initial state of the webpage. which is described as "on-homepage" in the domain file.
- The action names should be the same as the action names in the high level plan.
)PROMPT";

inline constexpr const char* kLowLevelActionIdBody =
    R"PROMPT(You are given a task to perform on a webpage. Propose the next step that is helpful towards achieving the task.

You should output only an action that is most likely to help achieve the subgoal. Each action is a dictionary with the following keys:

{
  "INDEX": "action index",
  "ACTION": "CLICK" | "HOVER" | "TYPE" | "SELECT",
  "SELECTOR": "text='NEWS'" | "button:nth-of-type(3)" | "css=div.menu >> text='Super Bowl'" | ...,
  "VALUE": "if any (You may need to provide a value for the action, e.g. for TYPE action)",
  "TEXT": "the text that is visible on the element",
  "EXPLANATION": "a short explanation of why this action is useful"
}

Below is the simplified representation of the current state of the webpage:
{web_page}

History of steps so far: {history}
Below is the domain file, defining the precondition and postcondition (i.e. the desired outcome) of the high-level goals:
{domain_file}
Below is the the list of subgoals that have been accomplished so far:
{subgoals_accomplished}
Below is the next high-level step (subgoal) to be accomplished:
Step: {subgoal}
Below is the list of available actions. Do not output any actions that are not in the list of available actions. The only field you are allowed to modify is the "value" (if a TYPE or SELECT action) and "explanation" fields. You are not allowed to modify any other fields.

It is very important that your output contains only the action, and nothing else, that is directly parsable as a JSON object.

Available Actions:
{available_actions}
)PROMPT";

inline constexpr const char* kLowLevelExpandedBody =
    R"PROMPT(You are an assistant who not only helps to browse and operate web pages to achieve certain goals, but also needs to explore the information on the page to answer the questions raised by the target task. Please answer the following questions as much as possible.
There are key information you will get:
**Key Information**:
    - Previous trace: all thoughts, actions and reflections you have made historically.
    - Accessibility tree: characteristic expression of the current web page.

**Introduction to Accessibility Tree**:
    The accessibility tree is a tree-like data structure that describes the relationships between elements on a web page and provides accessibility information for each element (such as text, links, form elements, etc.).
    - **Accessibility Tree Example**:
        Here is an example of an accessibility tree:
        ```
        current web tab name is 'Google'
            [40] link 'About'
            [41] link 'Store'
                [186] link 'Gmail'
                [187] link 'Images'
                [163] textarea 'Search'
                [236] button 'See more'
        ```
In this example, each row represents the characteristic representation of a web page element. It has three attributes: '[40]' for the element's element_id, 'link' indicates the element is a link, and 'About' for the content of the element.
Note: The above element provided is purely for illustrative purposes and should NEVER be used directly in your output!

You should always consider previous and subsequent steps and what to do.
**Thought Space**:
    - What action do you think is needed now to complete the task?
    - What's the reason of taking that action?

You have access to the following tools(helpful to interact with web page):
**Execution Action Space**:
    - goto: useful for when you need visit a new link or a website, it will open a new tab.
    - fill_form: useful for when you need to fill out a form or input something from accessibility tree. Input should be a string.
    - google_search: useful for when you need to use google to search something.
    - click: useful for when you need to click a button/link from accessibility tree.
    - select_option: useful for when you need to select a drop-down box value. When you get (select and option) tags from the accessibility tree, you need to select the serial number(element_id) corresponding to the select tag, not the option, and select the most likely content corresponding to the option as Input.
    - go_back: useful when you find the current web page encounter some network error or you think the last step is not helpful.
    - cache_data: useful when you need to extract information from the page that you think is extremely valuable for completing the target task. It is not a direct answer to the target task, but it is extremely relevant to the target task. Subsequent actions may refer to this part of the information and return this information as input
    - get_final_answer: useful for when you think it is the answer to the target task and no other operations are required, Input should be a answer content.

You also need to provide an effective description of the current execution action.
A proper description contains:
    - What website it is;
    - Which action you choose;
    - REMEMBER DO NOT LEAVE THE DESCRIPTION EMPTY!

You have to follow the instructions or notes:
**Important Notes**:
    - Under the following conditions, you are restricted to using the `google_search` or `goto` tools exclusively:
        1. In the initial step of a process or when there's no preceding interaction history (i.e., the previous trace is empty).
        2. In situations where the accessibility tree is absent or not provided.
    - Your action should not be the same as last step's action.
    - The `element_id` should be an integer accurately representing the element's ID in the accessibility tree.
    - AVOID using the provided example's element_id as your output.
    - The output JSON blob must be valid; otherwise, it cannot be recognized.

**Special Circumstances Guidelines**:
    - When performing a search on a website, if you find the search results do not display sufficient content, consider simplifying or modifying your search query. Reducing the complexity of your search query or altering keywords may yield more comprehensive results.

Please ensure the accuracy of your output, as we will execute subsequent steps based on the `action`, `action_input` and `element_id` you provide.

**Output Requirements**:
- Ensure your output strictly adheres to the JSON blob format outlined below:

    {
        "thought": "ACTUAL_THOUGHT",
        "action": "ACTUAL_TOOLS",
        "action_input": "ACTUAL_INPUT",
        "element_id": "ACTUAL_ELEMENT_ID",
        "description": "ACTUAL_DESCRIPTION"
    }

- A VALID JSON BLOB EXAMPLE AS FOLLOWS:
    {
        "thought": "In order to complete this task,I need to go to the Google home page",
        "action": "click",
        "action_input": "button",
        "element_id": "236",
        "description": "Now I'm on Google's main page. I'm now clicking the button with element_id [236] to see more information."
    }

Current Task Context:
- Subgoal: {subgoal}
- Previous trace: {history}
- Accessibility tree: {web_page}
)PROMPT";

inline constexpr const char* kPostconditionIdBody =
    R"PROMPT(You are given a high-level step and a web page. Check if the expected effects of the executed action have been achieved.
Below is the history of actions performed so far, including the action that was just executed.
Each of the actions is a dictionary with the following keys. Think about the effects of each action and what they do to the state of the webpage before deciding.
"INDEX": "action index",
"ACTION": "CLICK"|"HOVER"|"TYPE"|"SELECT",
"SELECTOR": "text='NEWS'" | "button:nth-of-type(3)" | ...",
"VALUE": "if any",
"TEXT": "the text visible on the element",

Each action is also followed by whether it was successful and an observation of the webpage state after the action was executed.

Your task:
1. Understand and reason about what the executed effects of the high-level step should be.
2. Check if the postconditions/effects of the executed action have been achieved based on the history of actions performed so far and the current state of the webpage.
3. Check if the current web page does satisfy the postconditions/effects of the executed action.
4. Output an answer to the question: "Have the postconditions/effects of the executed action been achieved?"

Your output should ONLY be a json object with the following keys:
{
    "explanation": "a short explanation of why the postconditions were achieved or not, referencing specific elements or changes in the web page"
    "answer": "YES" | "NO"
}

Output only The JSON object, and nothing else. Do not use Markdown formatting.

Below is the task:
{task}

Below is the high-level step that we would like to check whether it was successfully achieved:
{executed_action}

Domain File: {domain_file}

Below is the simplified representation of the current state of the web page:
{web_page}

Here is the history of actions performed so far:

{history}
)PROMPT";

inline constexpr const char* kPostconditionExpandedBody =
    R"PROMPT(You are given a high-level step and a web page. Check if the expected effects of the executed action have been achieved.

Below is the history of actions performed so far, including the action that was just executed.
Each of the actions is a dictionary with the following keys. Think about the effects of each action and what they do to the state of the webpage before deciding.
"thought": "The reasoning behind taking this action",
"action": "The action type (goto, click, fill_form, select_option, google_search, go_back, cache_data, get_final_answer)",
"action_input": "The input value for the action (e.g. text to fill, URL to navigate to, option to select, etc.)",
"element_id": "The ID of the element to interact with",
"description": "A description of what the action does"

Each action is also followed by whether it was successful and an observation of the webpage state after the action was executed.

Your task:
1. Understand and reason about what the executed effects of the high-level step should be.
2. Check if the postconditions/effects of the executed action have been achieved based on the history of actions performed so far and the current state of the webpage.
3. Check if the current web page does satisfy the postconditions/effects of the executed action.
4. Output an answer to the question: "Have the postconditions/effects of the executed action been achieved?"

Your output should ONLY be a json object with the following keys:

{
    "explanation": "a short explanation of why the postconditions were achieved or not, referencing specific elements or changes in the web page"
    "answer": "YES" | "NO"
}

Output only The JSON object, and nothing else. Do not use Markdown formatting.

Below is the task:
{task}

Below is the high-level step that we would like to check whether it was successfully achieved:
{executed_action}

Domain File: {domain_file}

Below is the simplified representation of the current state of the web page:
{web_page}

Here is the history of actions performed so far:

{history}
)PROMPT";

inline constexpr const char* kReplanningBody =
    R"PROMPT(You are an intelligent assistant helping a user complete a task on a web page.

IMPORTANT: The user has already attempted this task with a previous plan that did not succeed. You need to propose a NEW high-level plan.

You have TWO options:
1. **Start over completely**: Propose a completely new high-level plan from scratch, ignoring the previous attempt.
2. **Continue from last successful action**: Build upon the actions that were successfully completed, and propose a new plan that continues from where the last successful action left off.

{plan_context}
{history_text}
{failure_context}

Based on the history above, decide whether to:
- Start over with a completely new approach, OR
- Continue from the last successful action

Then propose a high-level plan accordingly.

First, reflect step-by-step:
1. What is the user trying to accomplish?
2. What subgoals must be achieved?
3. Should I start over or continue from the last successful action? Why?
4. Can each subgoal be broken into lower-level actions (click, type, etc.)?
5. Are these steps reusable and modular across different pages?

Then output your response in this **strict format**. You have to output the plan salvageability assessment and the explanation first, then the proposed high-level plan.

Plan Salvageability Assessment:
- Is the original plan salvageable? Answer: "YES" or "NO"
- Reasoning: Explain why the plan is or is not salvageable. If salvageable, explain which parts can be reused and which steps were already completed. If not salvageable, explain why starting over is necessary.

Explanation:
- Your reasoning for proposing the high-level plan in 2-3 sentences.
- If salvageable, clearly state which steps were already completed and which steps remain.

Proposed high-level plan:
1. Step one
2. Step two
...

IMPORTANT REMINDER: If you answered "YES" (plan is salvageable), you MUST ONLY include the REMAINING steps that still need to be completed in your high-level plan. Do NOT repeat steps that were already successfully completed. If you answered "NO" (plan is not salvageable), include ALL steps needed to complete the task from scratch.

Rules:
- Do NOT use markdown formatting.
- Make sure each step is atomic, reusable, and task-driven.
- Focus on clarity, reusability, and structure.
- Make sure each step is a high-level skill that can be decomposed into low-level actions and this used to achieve a subgoal needed to achieve the task.
- Do not use dummy credentials to log in. Unless explicitly asked to do so as part of the task, and credentials are provided, then you should not propose to sign in.
- Do not use dummy inputs. If you do not know the inputs, then you need to find a new action.
- You are not allowed to make up specific links.
- Make sure each action is atomic and reusable.
- Keep the actions at a high level. Do not make up any details about the parameters when you instantiate actions.

Webpage: {web_page}
Task: {task}
)PROMPT";

inline constexpr const char* kEndToEndEvalBody =
    R"PROMPT(You have a task and an action history. Your goal is to evaluate if the action history and the current web page meet the task requirements. You should reason about the action history that got us to the current web page to determine if they meet the task requirements.

{action_format_description}

Your answer should be a json object with the following format:

{
    "explanation": "Your explanation here",
    "answer": "YES" or "NO",
}

IT IS VERY IMPORTANT THAT YOUR OUTPUT IS A JSON object, AND NOTHING ELSE. THE OUTPUT SHOULD BE DIRECTLY PARSABLE AS A JSON OBJECT.

Answer the following question: Does the action sequence meet the task requirements?

**Task**: {task}
**Action History**: {action_history}
**Current Web Page**: {web_page}
)PROMPT";

inline constexpr const char* kAlignmentJudgeBody =
    R"PROMPT(You are an expert evaluator comparing a human-authored plan and an LLM-generated plan
for the same web navigation task.

TASK: {task}

HUMAN PLAN:
{human_plan}

LLM PLAN:
{llm_plan}

For each human step:
- Identify which step(s) in the LLM plan correspond to it, if any. Note, that LLM plans might be written in a different syntax or representation of the same step.
- Classify its alignment status as one of:
  - "aligned": the same intent or action appears in the LLM plan. This means that the step could be matched exactly to one step in the LLM plan. If a step is matched to multiple steps in the LLM plan, then it is decomposed. The step from the LLM plan that is matched to the human step should also not violate or assume additional temporal dependencies that are not present in the human plan.
  - "partial": part of the step's intent appears, but it is missing part of the step's intent.
  - "missing": the action is completely omitted from the LLM plan.
  - "decomposed": the human step is split into multiple smaller LLM steps. This means that the step is matched to multiple steps in the LLM plan.
  - "unmatched": If there exists a step in the LLM plan that are not matched to any human step, annotate it as "unmatched". Report all unmatched steps in one entry, with a "null" in the human_step field and a list of all unmatched steps in the matched_llm_steps field.

If decomposed:
- Determine whether this decomposition is "useful" (adds clarity or logical substructure)
  or "harmful" (introduces redundant or overly detailed low-level steps that assumes preconditions that might not hold true (e.g. if a step requires the existence of a certain button that has not been seen yet)).

Return a JSON object of this form:
{
  "steps": [
    {
        "reasoning": "<brief explanation why the step is aligned, partial, missing, or decomposed and why the steps are matched>",
        "human_step": "<text>"|null(if reporting unmatched steps),
        "matched_llm_steps": ["<matching step(s)>, give the step numbers (1-indexed)"],
        "status": "aligned"|"partial"|"missing"|"decomposed"|"unmatched",
    }
  ]
}

Note that every step in the LLM plan must be matched to a human step or be annotated as "unmatched".

Output JSON only, nothing else.
)PROMPT";

inline const std::vector<PromptTemplate>& prompt_templates() {
  static const std::vector<PromptTemplate> templates = {
      {"nl_plan", kNlPlanBody, {"task", "web_page"}},
      {"pddl_plan", kPddlPlanBody, {"task", "web_page"}},
      {"pddl_domain", kPddlDomainBody, {"task", "high_level_plan"}},
      {"lowlevel_action_id",
       kLowLevelActionIdBody,
       {"web_page", "history", "domain_file", "subgoals_accomplished", "subgoal",
        "available_actions"}},
      {"lowlevel_expanded", kLowLevelExpandedBody, {"subgoal", "history", "web_page"}},
      {"postcondition_id",
       kPostconditionIdBody,
       {"task", "executed_action", "domain_file", "web_page", "history"}},
      {"postcondition_expanded",
       kPostconditionExpandedBody,
       {"task", "executed_action", "domain_file", "web_page", "history"}},
      {"replanning",
       kReplanningBody,
       {"plan_context", "history_text", "failure_context", "web_page", "task"}},
      {"e2e_eval",
       kEndToEndEvalBody,
       {"action_format_description", "task", "action_history", "web_page"}},
      {"alignment_judge", kAlignmentJudgeBody, {"task", "human_plan", "llm_plan"}},
  };
  return templates;
}

inline const PromptTemplate& prompt_template(std::string_view name) {
  for (const PromptTemplate& t : prompt_templates()) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::ConfigError, "unknown prompt template '" + std::string(name) + "'");
}

/// Byte-exact slot substitution: every required slot must be supplied, and
/// only declared slots are substituted (JSON braces in the bodies survive).
inline std::string render_text(const PromptTemplate& tmpl,
                               const std::map<std::string, std::string>& slots) {
  std::string text = tmpl.body;
  for (const std::string& slot : tmpl.required_slots) {
    auto it = slots.find(slot);
    if (it == slots.end()) {
      throw Error(ErrorCode::MissingSlot,
                  "template '" + tmpl.name + "' requires slot '" + slot + "'");
    }
    const std::string pattern = "{" + slot + "}";
    size_t pos = 0;
    while ((pos = text.find(pattern, pos)) != std::string::npos) {
      text.replace(pos, pattern.size(), it->second);
      pos += it->second.size();
    }
  }
  return text;
}

}  // namespace strata::llm
