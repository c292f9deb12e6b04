//! The shared trial protocol.
//!
//! ```text
//! awaitFixation --(cross held fixationHold)--> segment 0 .. segment n-1
//!   --> response --(widget held responseHold | responseTimeout)--> intertrial
//!   --(intertrial steps)--> awaitFixation
//! ```
//!
//! Gaze detection runs through widget callbacks and phase changes through
//! kit timers; both only push [`TaskEvent`]s into the shared [`TaskCtx`],
//! which the runner consumes after each dispatch.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{layout, Paradigm, Stage, TrialPlan, WidgetSpec};
use crate::config::{EnvConfig, RewardConfig, TimingConfig};
use crate::env::ScreenPoint;
use crate::error::Result;
use crate::raster::fixation_cross;
use crate::rng::{SeedTree, StreamRng};
use crate::session::{TrialRecord, SCHEMA_VERSION};
use crate::staircase::{Staircase, StaircaseConfig, TrialCase};
use crate::widget::{TexelRect, Widget, WidgetKit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TrialPhase {
    AwaitFixation,
    Stimulus,
    Retention,
    Response,
    Intertrial,
}

impl TrialPhase {
    pub fn label(self) -> &'static str {
        match self {
            TrialPhase::AwaitFixation => "awaitFixation",
            TrialPhase::Stimulus => "stimulus",
            TrialPhase::Retention => "retention",
            TrialPhase::Response => "response",
            TrialPhase::Intertrial => "intertrial",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskEvent {
    Fixated,
    Responded(String),
    PhaseTimer(u64),
}

/// Widget-callback context: events raised during one dispatch.
#[derive(Debug, Default)]
pub struct TaskCtx {
    pub events: Vec<TaskEvent>,
}

/// A live response option as seen on screen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResponseTarget {
    pub label: String,
    pub center: ScreenPoint,
    pub rect: (u32, u32, u32, u32),
}

const FIXATION: &str = "fixation";
const PHASE_TIMER: &str = "phase";

struct ActiveTrial {
    plan: TrialPlan,
    case: TrialCase,
    levels: Vec<usize>,
    start_step: u64,
    response_onset: u64,
}

pub struct TrialRunner {
    paradigm: Box<dyn Paradigm>,
    staircase: Staircase,
    timing: TimingConfig,
    reward: RewardConfig,
    fixation: WidgetSpec,
    trial_rng: StreamRng,
    anim_rng: StreamRng,
    phase: TrialPhase,
    stage: Option<(Stage, u64)>,
    trial: Option<ActiveTrial>,
    live: Vec<String>,
    timer_gen: u64,
    trial_index: u64,
    episode_id: u64,
    seed: u64,
    completed: Vec<TrialRecord>,
}

impl TrialRunner {
    pub fn new(paradigm: Box<dyn Paradigm>, config: &EnvConfig) -> Result<Self> {
        let mut sc: StaircaseConfig = config.staircase.clone();
        if !paradigm.adaptive() {
            sc.enabled = false;
        }
        let staircase = Staircase::new(&paradigm.ladder_sizes(), &sc)?;
        let side = (config.screen.fixation_size * f64::from(config.geometry.screen_width)).round() as u32;
        let fixation = layout::texel_widget(FIXATION, fixation_cross(side.max(5)), (0.5, 0.5), config);
        let tree = SeedTree::new(config.seed);
        Ok(Self {
            paradigm,
            staircase,
            timing: config.timing.clone(),
            reward: config.reward.clone(),
            fixation,
            trial_rng: tree.stream("trials"),
            anim_rng: tree.stream("animation"),
            phase: TrialPhase::AwaitFixation,
            stage: None,
            trial: None,
            live: Vec::new(),
            timer_gen: 0,
            trial_index: 0,
            episode_id: 0,
            seed: config.seed,
            completed: Vec::new(),
        })
    }

    pub fn task_name(&self) -> &'static str {
        self.paradigm.name()
    }

    pub fn paradigm(&self) -> &dyn Paradigm {
        self.paradigm.as_ref()
    }

    pub fn staircase(&self) -> &Staircase {
        &self.staircase
    }

    pub fn phase(&self) -> TrialPhase {
        self.phase
    }

    pub fn trial_index(&self) -> u64 {
        self.trial_index
    }

    pub fn correct_response(&self) -> Option<&str> {
        self.trial.as_ref().map(|t| t.plan.correct_response.as_str())
    }

    pub fn current_levels(&self) -> Option<&[usize]> {
        self.trial.as_ref().map(|t| t.levels.as_slice())
    }

    pub fn current_plan(&self) -> Option<&TrialPlan> {
        self.trial.as_ref().map(|t| &t.plan)
    }

    /// The fixation cross center while the runner waits for fixation.
    pub fn fixation_target(&self, kit: &WidgetKit<TaskCtx>) -> Option<ScreenPoint> {
        (self.phase == TrialPhase::AwaitFixation)
            .then(|| kit.widget_rect(FIXATION).map(|r| r.center()))
            .flatten()
    }

    /// Live response widgets, in plan order.
    pub fn response_targets(&self, kit: &WidgetKit<TaskCtx>) -> Vec<ResponseTarget> {
        if self.phase != TrialPhase::Response {
            return Vec::new();
        }
        let Some(t) = &self.trial else {
            return Vec::new();
        };
        t.plan
            .responses
            .iter()
            .filter_map(|r| {
                kit.widget_rect(&r.widget.name).map(|rect: TexelRect| ResponseTarget {
                    label: r.label.clone(),
                    center: rect.center(),
                    rect: (rect.x0, rect.y0, rect.x1, rect.y1),
                })
            })
            .collect()
    }

    pub fn drain_records(&mut self) -> Vec<TrialRecord> {
        std::mem::take(&mut self.completed)
    }

    /// Start a new episode: clear the screen, reset the staircase and show the
    /// first fixation cross.
    pub fn reset(&mut self, kit: &mut WidgetKit<TaskCtx>, seed: u64, episode_id: u64) -> Result<()> {
        kit.clear();
        let tree = SeedTree::new(seed);
        self.trial_rng = tree.stream("trials");
        self.anim_rng = tree.stream("animation");
        self.seed = seed;
        self.episode_id = episode_id;
        self.staircase.reset();
        self.trial_index = 0;
        self.trial = None;
        self.stage = None;
        self.live.clear();
        self.completed.clear();
        self.timer_gen = 0;
        let mut ep_rng = tree.stream("episode");
        self.paradigm.begin_episode(&mut ep_rng);
        self.start_trial(kit, 0)
    }

    /// Consume the events of this tick's dispatch, then animate.
    pub fn tick(&mut self, kit: &mut WidgetKit<TaskCtx>, ctx: &mut TaskCtx, step: u64) -> Result<()> {
        let events = std::mem::take(&mut ctx.events);
        for ev in events {
            match ev {
                TaskEvent::Fixated if self.phase == TrialPhase::AwaitFixation => {
                    self.remove_live(kit, ctx)?;
                    self.enter_stage(kit, Stage::Segment(0), step)?;
                }
                TaskEvent::Responded(label) if self.phase == TrialPhase::Response => {
                    self.finish_trial(kit, ctx, step, Some(label))?;
                }
                TaskEvent::PhaseTimer(g) if g == self.timer_gen => match (self.phase, self.stage) {
                    (TrialPhase::Intertrial, _) => self.start_trial(kit, step)?,
                    (TrialPhase::Response, _) => self.finish_trial(kit, ctx, step, None)?,
                    (_, Some((Stage::Segment(i), _))) => {
                        self.remove_live(kit, ctx)?;
                        self.enter_stage(kit, Stage::Segment(i + 1), step)?;
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        if let Some((stage, since)) = self.stage {
            if step > since {
                for (name, img) in self.paradigm.animate(stage, step - since, &mut self.anim_rng) {
                    if kit.has_widget(&name) {
                        kit.set_image(&name, img)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn new_timer(&mut self, kit: &mut WidgetKit<TaskCtx>, timeout: u64) -> Result<()> {
        kit.remove_timer(PHASE_TIMER);
        self.timer_gen += 1;
        let g = self.timer_gen;
        kit.add_timer(PHASE_TIMER, timeout.max(1), move |ctx: &mut TaskCtx, _api| {
            ctx.events.push(TaskEvent::PhaseTimer(g));
        })?;
        Ok(())
    }

    fn add(&mut self, kit: &mut WidgetKit<TaskCtx>, w: Widget<TaskCtx>) -> Result<()> {
        self.live.push(w.name.clone());
        kit.add_widget(w)?;
        Ok(())
    }

    fn remove_live(&mut self, kit: &mut WidgetKit<TaskCtx>, ctx: &mut TaskCtx) -> Result<()> {
        for name in std::mem::take(&mut self.live) {
            if kit.has_widget(&name) {
                kit.remove_widget(&name, ctx)?;
            }
        }
        Ok(())
    }

    fn start_trial(&mut self, kit: &mut WidgetKit<TaskCtx>, step: u64) -> Result<()> {
        kit.remove_timer(PHASE_TIMER);
        let case = self.staircase.next_case(&mut self.trial_rng);
        let plan = self.paradigm.build_trial(&case.levels, step, &mut self.trial_rng)?;
        let levels = plan.levels_override.clone().unwrap_or_else(|| case.levels.clone());
        self.trial = Some(ActiveTrial {
            plan,
            case,
            levels,
            start_step: step,
            response_onset: step,
        });
        self.phase = TrialPhase::AwaitFixation;
        self.stage = None;
        let hold = self.timing.fixation_hold;
        let f = &self.fixation;
        let w = Widget::new(f.name.clone(), f.image.clone(), f.pos, f.size).on_hover(
            move |ctx: &mut TaskCtx, _api, ev| {
                if ev.hover_time == hold {
                    ctx.events.push(TaskEvent::Fixated);
                }
            },
        );
        self.add(kit, w)
    }

    fn enter_stage(&mut self, kit: &mut WidgetKit<TaskCtx>, stage: Stage, step: u64) -> Result<()> {
        let n_segments = self.trial.as_ref().map_or(0, |t| t.plan.segments.len());
        let stage = match stage {
            Stage::Segment(i) if i >= n_segments => Stage::Response,
            s => s,
        };
        let updates = self.paradigm.animate(stage, 0, &mut self.anim_rng);
        let trial = self.trial.as_mut().expect("stage entered without a trial");
        let patch = |w: &WidgetSpec| {
            let img = updates
                .iter()
                .find(|(n, _)| *n == w.name)
                .map_or_else(|| w.image.clone(), |(_, i)| i.clone());
            Widget::new(w.name.clone(), img, w.pos, w.size)
        };
        let mut widgets = Vec::new();
        match stage {
            Stage::Segment(i) => {
                let seg = &trial.plan.segments[i];
                self.phase = seg.phase;
                widgets.extend(seg.widgets.iter().map(patch));
                let d = seg.duration;
                self.stage = Some((stage, step));
                for w in widgets {
                    self.add(kit, w)?;
                }
                return self.new_timer(kit, d);
            }
            Stage::Response => {
                self.phase = TrialPhase::Response;
                trial.response_onset = step;
                widgets.extend(trial.plan.response_stimuli.iter().map(patch));
                let hold = self.timing.response_hold;
                for r in &trial.plan.responses {
                    let label = r.label.clone();
                    widgets.push(patch(&r.widget).on_hover(move |ctx: &mut TaskCtx, _api, ev| {
                        if ev.hover_time == hold {
                            ctx.events.push(TaskEvent::Responded(label.clone()));
                        }
                    }));
                }
            }
        }
        self.stage = Some((stage, step));
        for w in widgets {
            self.add(kit, w)?;
        }
        let timeout = self.timing.response_timeout;
        self.new_timer(kit, timeout)
    }

    fn finish_trial(
        &mut self,
        kit: &mut WidgetKit<TaskCtx>,
        ctx: &mut TaskCtx,
        step: u64,
        response: Option<String>,
    ) -> Result<()> {
        let trial = self.trial.take().expect("finish without a trial");
        let correct = response.as_deref().is_some_and(|r| trial.plan.judge(r));
        let reward = if correct {
            self.reward.correct
        } else {
            self.reward.incorrect
        };
        if reward != 0.0 {
            kit.add_reward(reward)?;
        }
        self.staircase.record(&trial.case, correct);
        self.paradigm.on_outcome(&trial.plan, response.as_deref(), correct);
        let mut descriptor = trial.plan.descriptor.clone();
        descriptor.insert("correctResponse".into(), Value::from(trial.plan.correct_response.clone()));
        self.completed.push(TrialRecord {
            schema_version: SCHEMA_VERSION,
            episode_id: self.episode_id,
            trial_index: self.trial_index,
            task_name: self.paradigm.name().to_string(),
            trial_case_kind: trial.case.kind.label(),
            difficulty_levels: trial.levels.clone(),
            stimulus_descriptor: descriptor,
            timed_out: response.is_none(),
            response_label: response,
            correct,
            reaction_steps: step - trial.response_onset,
            reward,
            start_step: trial.start_step,
            end_step: step,
            seed: self.seed,
        });
        self.trial_index += 1;
        self.remove_live(kit, ctx)?;
        self.stage = None;
        self.phase = TrialPhase::Intertrial;
        if self.timing.intertrial == 0 {
            self.start_trial(kit, step)
        } else {
            let iti = self.timing.intertrial;
            self.new_timer(kit, iti)
        }
    }
}
