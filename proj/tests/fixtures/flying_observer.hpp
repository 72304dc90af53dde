#pragma once

// Small hand-written flying-observer instance: one 30-unit leg, one
// observation from 10 units on lasting 2, one piece of equipment.

inline constexpr const char* kObserverDomain = R"(
(define (domain flying-observer)
  (:requirements :typing :durative-actions :fluents :continuous-effects)
  (:types leg observation equipment)
  (:predicates (on-ground) (first-leg ?l - leg) (flying ?l - leg) (done ?l - leg) (next ?a ?b - leg)
               (available ?e - equipment) (optionfor ?o - observation ?e - equipment)
               (configuredfor ?o - observation) (pending ?o - observation ?e - equipment)
               (contains ?l - leg ?o - observation) (awaiting ?o - observation) (observed ?o - observation))
  (:functions (flown ?l - leg) (distance ?l - leg) (speed ?l - leg)
              (target-start ?o - observation) (time-for ?o - observation) - number)
  (:durative-action take-off
    :parameters (?l - leg)
    :duration (= ?duration 5)
    :condition (and (at start (on-ground)) (at start (first-leg ?l)))
    :effect (and (at start (not (on-ground))) (at start (assign (flown ?l) 0)) (at end (flying ?l))))
  (:durative-action set-course
    :parameters (?a ?b - leg)
    :duration (= ?duration 1)
    :condition (and (at start (done ?a)) (at start (next ?a ?b)))
    :effect (and (at start (not (done ?a))) (at end (flying ?b)) (at end (assign (flown ?b) 0))))
  (:durative-action fly
    :parameters (?l - leg)
    :duration (= ?duration (/ (distance ?l) (speed ?l)))
    :condition (and (at start (flying ?l)) (over all (<= (flown ?l) (distance ?l))))
    :effect (and (at end (done ?l)) (at end (not (flying ?l)))
                 (increase (flown ?l) (* #t (speed ?l)))))
  (:durative-action configure
    :parameters (?o - observation ?e - equipment)
    :duration (= ?duration 1)
    :condition (and (at start (available ?e)) (at start (optionfor ?o ?e)))
    :effect (and (at start (not (available ?e))) (at end (configuredfor ?o)) (at end (pending ?o ?e))))
  (:durative-action observe
    :parameters (?l - leg ?o - observation)
    :duration (= ?duration (time-for ?o))
    :condition (and (at start (configuredfor ?o)) (at start (contains ?l ?o)) (at start (awaiting ?o))
                    (at start (>= (flown ?l) (target-start ?o))) (over all (flying ?l)))
    :effect (and (at start (not (awaiting ?o))) (at end (observed ?o))))
  (:durative-action release
    :parameters (?o - observation ?e - equipment)
    :duration (= ?duration 1)
    :condition (and (at start (pending ?o ?e)))
    :effect (and (at start (not (configuredfor ?o))) (at start (not (pending ?o ?e))) (at end (available ?e))))
)
)";

inline constexpr const char* kObserverProblem = R"(
(define (problem one-leg)
  (:domain flying-observer)
  (:objects l0 - leg o1 - observation e1 - equipment)
  (:init (on-ground) (first-leg l0) (available e1) (optionfor o1 e1) (contains l0 o1) (awaiting o1)
         (= (flown l0) 0) (= (distance l0) 30) (= (speed l0) 1) (= (target-start o1) 10) (= (time-for o1) 2))
  (:goal (and (observed o1) (done l0)))
)
)";
