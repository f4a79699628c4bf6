/** Bootstrap: pick a collection (from ?collection= or by uploading a
 * snapshot), then switch between the zoomer and annotator views. */

import { HttpApi, type Api } from "./api.js";
import { renderAnnotator } from "./annotator.js";
import { initialState, type ViewState } from "./state.js";
import { renderZoomer } from "./zoomer.js";

function mountViews(root: HTMLElement, api: Api, state: ViewState): void {
  root.textContent = "";
  const tabs = document.createElement("nav");
  const zoomerTab = document.createElement("button");
  zoomerTab.textContent = "Zoomer";
  const annotatorTab = document.createElement("button");
  annotatorTab.textContent = "Annotator";
  tabs.append(zoomerTab, annotatorTab);

  const stage = document.createElement("main");
  root.append(tabs, stage);

  const show = (view: "zoomer" | "annotator"): void => {
    state.activeView = view;
    stage.textContent = "";
    zoomerTab.classList.toggle("active", view === "zoomer");
    annotatorTab.classList.toggle("active", view === "annotator");
    if (view === "zoomer") {
      renderZoomer(stage, api, state);
    } else {
      renderAnnotator(stage, api, state);
    }
  };
  zoomerTab.addEventListener("click", () => show("zoomer"));
  annotatorTab.addEventListener("click", () => show("annotator"));
  show(state.activeView);
}

function mountLoader(root: HTMLElement, api: Api): void {
  root.textContent = "";
  const box = document.createElement("div");
  box.className = "loader";
  box.innerHTML =
    "<h1>treekit</h1>" +
    "<p>Open with <code>?collection=&lt;id&gt;</code> (ids are printed by " +
    "<code>treekit serve</code>), or load a snapshot:</p>";
  const fileInput = document.createElement("input");
  fileInput.type = "file";
  fileInput.accept = ".json,application/json";
  const error = document.createElement("p");
  error.className = "banner hidden";
  box.append(fileInput, error);
  root.append(box);

  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    void (async () => {
      try {
        const info = await api.createCollection(await file.text());
        const url = new URL(window.location.href);
        url.searchParams.set("collection", info.id);
        window.history.replaceState(null, "", url);
        mountViews(root, api, initialState(info.id));
      } catch (err) {
        error.textContent = String(err);
        error.classList.remove("hidden");
      }
    })();
  });
}

export function start(root: HTMLElement, api: Api = new HttpApi()): void {
  const collection = new URLSearchParams(window.location.search).get("collection");
  if (collection) {
    mountViews(root, api, initialState(collection));
  } else {
    mountLoader(root, api);
  }
}

const appRoot = document.getElementById("app");
if (appRoot) {
  start(appRoot);
}
