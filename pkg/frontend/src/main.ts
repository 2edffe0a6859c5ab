/** Panel bootstrap: model/instance pickers plus the live task board. */

import { EngineApi } from "./api.js";
import { bindPanel } from "./dom.js";
import { LiveUpdates } from "./live.js";
import { PanelController } from "./viewmodel.js";

async function boot(): Promise<void> {
  const api = new EngineApi("");
  const controller = new PanelController(api);
  const live = new LiveUpdates(api, (batch) => controller.onNotifications(batch));

  const modelSelect = document.getElementById("model") as HTMLSelectElement;
  const instanceSelect = document.getElementById("instance") as HTMLSelectElement;
  const newInstance = document.getElementById("new-instance") as HTMLButtonElement;
  const board = document.getElementById("board") as HTMLElement;

  bindPanel(board, controller);

  const models = await api.models();
  for (const model of models) {
    const option = document.createElement("option");
    option.value = model.hash;
    option.textContent = `${model.name} (${model.hash.slice(0, 8)})`;
    modelSelect.appendChild(option);
  }

  async function loadInstances(): Promise<void> {
    const hash = modelSelect.value;
    if (!hash) return;
    await controller.selectModel(hash);
    instanceSelect.textContent = "";
    for (const address of await api.instances(hash)) {
      const option = document.createElement("option");
      option.value = address;
      option.textContent = address.slice(0, 12);
      instanceSelect.appendChild(option);
    }
    if (instanceSelect.value) {
      await controller.selectInstance(instanceSelect.value);
    }
  }

  modelSelect.addEventListener("change", () => void loadInstances());
  instanceSelect.addEventListener("change",
    () => void controller.selectInstance(instanceSelect.value));
  newInstance.addEventListener("click", async () => {
    const hash = modelSelect.value;
    if (!hash) return;
    const created = await api.createInstance(hash);
    await loadInstances();
    instanceSelect.value = created.address;
    await controller.selectInstance(created.address);
  });

  if (models.length > 0) {
    modelSelect.value = models[0]!.hash;
    await loadInstances();
  }
  live.start();
}

void boot();
